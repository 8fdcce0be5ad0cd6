#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cxg/categories.hpp"
#include "cxg/upos.hpp"

namespace cxg {

/// One corpus position with its lexical, syntactic and semantic fillers.
struct Token {
  std::string form;  // lowercased word-form
  Upos upos = Upos::X;
  ClusterId sem = kOov;

  friend bool operator==(const Token&, const Token&) = default;
};

/// A construction match never crosses a sentence boundary.
struct Sentence {
  std::vector<Token> tokens;
  std::string doc_id;

  std::size_t size() const { return tokens.size(); }
};

struct EncodedCorpus {
  std::vector<Sentence> sentences;
  std::optional<std::string> register_tag;

  std::size_t word_count() const;
  bool empty() const { return sentences.empty(); }
};

enum class CorpusFormat { Tsv, Jsonl };

CorpusFormat parse_corpus_format(std::string_view name);

struct ReadOptions {
  bool drop_punct = true;  // PUNCT tokens removed; sentences left empty are dropped
};

/// TSV: `form<TAB>upos` rows, blank line between sentences, optional
/// `# doc_id = X` comment lines. JSONL: one `{"tokens":[{"form","upos"}]}`
/// object per line with an optional "doc_id". Semantics are left as OOV.
EncodedCorpus read_tagged_corpus(const std::filesystem::path& path, CorpusFormat format,
                                 const ReadOptions& options = {});
EncodedCorpus parse_tagged_corpus(std::istream& in, CorpusFormat format, const ReadOptions& options = {},
                                  const std::string& source = "<stream>");

/// Canonical TSV form; `parse_tagged_corpus(Tsv)` reads it back unchanged.
void write_tagged_corpus(const EncodedCorpus& corpus, std::ostream& out);

/// Sets every token's cluster from the lexicon; absent forms become OOV.
EncodedCorpus attach_semantics(EncodedCorpus corpus, const SemanticLexicon& lexicon);

/// Greedy in-order partition into chunks of at least `size` words (the last
/// chunk may be smaller). Sentences are never split.
std::vector<EncodedCorpus> split_subcorpora(const EncodedCorpus& corpus, long long size);

}  // namespace cxg
