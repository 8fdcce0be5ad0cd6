#include <doctest.h>

#include <numeric>
#include <random>
#include <sstream>

#include "cxg/corpus.hpp"
#include "cxg/errors.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace cxg;

namespace {

EncodedCorpus parse_tsv(const std::string& text, ReadOptions opts = {}) {
  std::istringstream in(text);
  return parse_tagged_corpus(in, CorpusFormat::Tsv, opts);
}

}  // namespace

TEST_CASE("TSV reader builds sentences from tagged rows") {
  const auto corpus = parse_tsv("was\tAUX\nbeing\tAUX\nspread\tVERB\n");
  REQUIRE(corpus.sentences.size() == 1);
  CHECK(corpus.word_count() == 3);
  const auto& s = corpus.sentences[0];
  CHECK(s.tokens[0] == Token{"was", Upos::AUX, kOov});
  CHECK(s.tokens[1] == Token{"being", Upos::AUX, kOov});
  CHECK(s.tokens[2] == Token{"spread", Upos::VERB, kOov});
}

TEST_CASE("empty input is an empty corpus") {
  const auto corpus = parse_tsv("");
  CHECK(corpus.empty());
  CHECK(corpus.word_count() == 0);
}

TEST_CASE("unknown tag is a validation error naming the tag") {
  try {
    parse_tsv("foo\tXYZ\n");
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("unknown tag XYZ") != std::string::npos);
  }
}

TEST_CASE("malformed row reports its line") {
  try {
    parse_tsv("a\tDET\nbroken row without tab\tNOUN\textra\n");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("blank lines separate sentences, comments set the document") {
  const auto corpus = parse_tsv("# doc_id = d1\nThe\tDET\nHouse\tNOUN\n\n\n# newdoc id = d2\nran\tVERB\n");
  REQUIRE(corpus.sentences.size() == 2);
  CHECK(corpus.sentences[0].doc_id == "d1");
  CHECK(corpus.sentences[1].doc_id == "d2");
  CHECK(corpus.sentences[0].tokens[0].form == "the");
  CHECK(corpus.sentences[0].tokens[1].form == "house");
}

TEST_CASE("forms are lowercased beyond ASCII") {
  const auto corpus = parse_tsv("Ÿes\tINTJ\nÉCOLE\tNOUN\n");
  CHECK(corpus.sentences[0].tokens[0].form == "ÿes");
  CHECK(corpus.sentences[0].tokens[1].form == "école");
}

TEST_CASE("punctuation is dropped by default and kept on request") {
  const std::string text = "hi\tINTJ\n!\tPUNCT\n\n.\tPUNCT\n";
  const auto dropped = parse_tsv(text);
  CHECK(dropped.sentences.size() == 1);
  CHECK(dropped.word_count() == 1);
  const auto kept = parse_tsv(text, ReadOptions{false});
  CHECK(kept.sentences.size() == 2);
  CHECK(kept.word_count() == 3);
}

TEST_CASE("JSONL reader") {
  std::istringstream in(
      "{\"doc_id\":\"x\",\"tokens\":[{\"form\":\"Play\",\"upos\":\"VERB\"},{\"form\":\"the\",\"upos\":\"DET\"}]}\n"
      "\n"
      "{\"tokens\":[{\"form\":\"game\",\"upos\":\"NOUN\"}]}\n");
  const auto corpus = parse_tagged_corpus(in, CorpusFormat::Jsonl);
  REQUIRE(corpus.sentences.size() == 2);
  CHECK(corpus.sentences[0].doc_id == "x");
  CHECK(corpus.sentences[0].tokens[0].form == "play");
  CHECK(corpus.word_count() == 3);
}

TEST_CASE("JSONL errors carry the line number") {
  std::istringstream bad("{\"tokens\":[]}\n{not json\n");
  try {
    parse_tagged_corpus(bad, CorpusFormat::Jsonl);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream tag("{\"tokens\":[{\"form\":\"a\",\"upos\":\"Q\"}]}\n");
  CHECK_THROWS_AS(parse_tagged_corpus(tag, CorpusFormat::Jsonl), ValidationError);
}

TEST_CASE("TSV round trip") {
  std::mt19937_64 rng(3);
  auto corpus = testing::random_corpus(rng, 400, 20);
  for (auto& s : corpus.sentences)
    for (auto& t : s.tokens) t.sem = kOov;  // semantics are not serialized
  corpus.sentences[0].doc_id = "first";
  std::ostringstream out;
  write_tagged_corpus(corpus, out);
  const auto back = parse_tsv(out.str(), ReadOptions{false});
  REQUIRE(back.sentences.size() == corpus.sentences.size());
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) CHECK(back.sentences[i].tokens == corpus.sentences[i].tokens);
  CHECK(back.sentences[0].doc_id == "first");
}

TEST_CASE("missing file is an input error") {
  CHECK_THROWS_AS(read_tagged_corpus("/nonexistent/corpus.tsv", CorpusFormat::Tsv), InputError);
}

TEST_CASE("attach_semantics") {
  SemanticLexicon lex;
  lex.k = 600;
  lex.words = {"house"};
  lex.assignment = {{"house", 521}};
  const auto corpus = attach_semantics(testing::corpus_of({"the/DET house/NOUN near/ADP house/NOUN car/NOUN"}), lex);
  const auto& t = corpus.sentences[0].tokens;
  CHECK(t[1].sem == 521);
  CHECK(t[3].sem == t[1].sem);
  CHECK(t[4].sem == kOov);
  const auto again = attach_semantics(corpus, lex);
  CHECK(again.sentences[0].tokens == t);
}

TEST_CASE("split_subcorpora sizes against a scan") {
  std::mt19937_64 rng(11);
  const auto corpus = testing::random_corpus(rng, 250000, 50, 30);
  const auto parts = split_subcorpora(corpus, 100000);
  REQUIRE(parts.size() == 3);
  // scan oracle: cut after the sentence that brings a part to >= size
  std::vector<std::size_t> expected;
  std::size_t run = 0;
  for (const auto& s : corpus.sentences) {
    run += s.size();
    if (run >= 100000) {
      expected.push_back(run);
      run = 0;
    }
  }
  if (run > 0) expected.push_back(run);
  REQUIRE(expected.size() == parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) CHECK(parts[i].word_count() == expected[i]);
  CHECK(parts[0].word_count() < 100000 + 30);
  CHECK(parts[2].word_count() > 49000);

  std::size_t sentences = 0;
  for (const auto& p : parts) sentences += p.sentences.size();
  CHECK(sentences == corpus.sentences.size());
  CHECK(parts[1].sentences.front().tokens == corpus.sentences[parts[0].sentences.size()].tokens);
}

TEST_CASE("split_subcorpora edge cases") {
  const auto corpus = testing::corpus_of({"a/DET b/NOUN", "c/VERB", "d/ADV e/ADV f/ADV"});
  const auto one = split_subcorpora(corpus, 1000);
  REQUIRE(one.size() == 1);
  CHECK(one[0].word_count() == corpus.word_count());
  const auto each = split_subcorpora(corpus, 1);
  CHECK(each.size() == 3);
  CHECK_THROWS_AS(split_subcorpora(corpus, 0), std::invalid_argument);
}
