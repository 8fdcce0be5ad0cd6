#include "cxg/corpus.hpp"

#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cxg/errors.hpp"
#include "cxg/text.hpp"

namespace cxg {
namespace {

Upos checked_tag(std::string_view name, const std::string& source, std::size_t line_no) {
  const auto tag = parse_upos(name);
  if (!tag)
    throw ValidationError(source + ":" + std::to_string(line_no) + ": unknown tag " + std::string(name));
  return *tag;
}

void close_sentence(EncodedCorpus& corpus, Sentence& current, const std::string& doc_id) {
  if (!current.tokens.empty()) {
    current.doc_id = doc_id;
    corpus.sentences.push_back(std::move(current));
  }
  current = Sentence{};
}

void push_token(Sentence& sentence, std::string_view form, Upos tag, const ReadOptions& options) {
  if (options.drop_punct && tag == Upos::PUNCT) return;
  sentence.tokens.push_back(Token{text::to_lower(form), tag, kOov});
}

EncodedCorpus parse_tsv(std::istream& in, const ReadOptions& options, const std::string& source) {
  EncodedCorpus corpus;
  Sentence current;
  std::string doc_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = text::chomp(line);
    if (text::trim(row).empty()) {
      close_sentence(corpus, current, doc_id);
      continue;
    }
    if (row.front() == '#' && row.find('\t') == std::string_view::npos) {
      const auto body = text::trim(row.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) {
        const auto key = text::trim(body.substr(0, eq));
        if (key == "doc_id" || key == "newdoc id") {
          close_sentence(corpus, current, doc_id);
          doc_id = std::string(text::trim(body.substr(eq + 1)));
        }
      }
      continue;
    }
    const auto fields = text::split(row, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw ParseError(source, line_no, "expected 'form<TAB>upos'");
    push_token(current, fields[0], checked_tag(fields[1], source, line_no), options);
  }
  close_sentence(corpus, current, doc_id);
  return corpus;
}

EncodedCorpus parse_jsonl(std::istream& in, const ReadOptions& options, const std::string& source) {
  EncodedCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!row.is_object() || !row.contains("tokens") || !row["tokens"].is_array())
      throw ParseError(source, line_no, "expected object with a 'tokens' array");
    Sentence sentence;
    if (auto it = row.find("doc_id"); it != row.end()) {
      if (it->is_string()) sentence.doc_id = it->get<std::string>();
      else sentence.doc_id = it->dump();
    }
    for (const auto& tok : row["tokens"]) {
      if (!tok.is_object() || !tok.contains("form") || !tok.contains("upos") || !tok["form"].is_string() ||
          !tok["upos"].is_string() || tok["form"].get_ref<const std::string&>().empty())
        throw ParseError(source, line_no, "token needs string 'form' and 'upos'");
      push_token(sentence, tok["form"].get_ref<const std::string&>(),
                 checked_tag(tok["upos"].get_ref<const std::string&>(), source, line_no), options);
    }
    if (!sentence.tokens.empty()) corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

}  // namespace

std::size_t EncodedCorpus::word_count() const {
  return std::accumulate(sentences.begin(), sentences.end(), std::size_t{0},
                         [](std::size_t acc, const Sentence& s) { return acc + s.size(); });
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "tsv") return CorpusFormat::Tsv;
  if (name == "jsonl") return CorpusFormat::Jsonl;
  throw std::invalid_argument("unknown corpus format '" + std::string(name) + "' (expected tsv or jsonl)");
}

EncodedCorpus parse_tagged_corpus(std::istream& in, CorpusFormat format, const ReadOptions& options,
                                  const std::string& source) {
  return format == CorpusFormat::Tsv ? parse_tsv(in, options, source) : parse_jsonl(in, options, source);
}

EncodedCorpus read_tagged_corpus(const std::filesystem::path& path, CorpusFormat format,
                                 const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open corpus " + path.string());
  return parse_tagged_corpus(in, format, options, path.string());
}

void write_tagged_corpus(const EncodedCorpus& corpus, std::ostream& out) {
  std::string_view doc;
  bool first = true;
  for (const auto& s : corpus.sentences) {
    if (!first) out << '\n';
    if (first ? !s.doc_id.empty() : s.doc_id != doc) out << "# doc_id = " << s.doc_id << '\n';
    doc = s.doc_id;
    first = false;
    for (const auto& t : s.tokens) out << t.form << '\t' << to_string(t.upos) << '\n';
  }
}

EncodedCorpus attach_semantics(EncodedCorpus corpus, const SemanticLexicon& lexicon) {
  for (auto& s : corpus.sentences)
    for (auto& t : s.tokens) t.sem = lexicon.lookup(t.form);
  return corpus;
}

std::vector<EncodedCorpus> split_subcorpora(const EncodedCorpus& corpus, long long size) {
  if (size <= 0) throw std::invalid_argument("split_subcorpora: size must be positive");
  std::vector<EncodedCorpus> parts;
  EncodedCorpus current;
  current.register_tag = corpus.register_tag;
  std::size_t words = 0;
  for (const auto& s : corpus.sentences) {
    current.sentences.push_back(s);
    words += s.size();
    if (words >= static_cast<std::size_t>(size)) {
      parts.push_back(std::move(current));
      current = EncodedCorpus{};
      current.register_tag = corpus.register_tag;
      words = 0;
    }
  }
  if (!current.sentences.empty() || parts.empty()) parts.push_back(std::move(current));
  return parts;
}

}  // namespace cxg
