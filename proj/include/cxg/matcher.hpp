#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cxg/association.hpp"
#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"

namespace cxg {

/// A match before its realization string is materialized.
struct RawMatch {
  ConstructionId id;
  std::uint32_t start;
  std::uint32_t length;
};

/// Prefix-sharing automaton over slot sequences. Each token offers up to
/// three fillers (form, tag, cluster), so a walk from a start position
/// follows at most three edges per depth.
class PatternIndex {
 public:
  PatternIndex() = default;
  explicit PatternIndex(const Grammar& grammar);

  void add(ConstructionId id, const SlotSequence& slots);

  /// Appends every (pattern, start) match in the sentence, ordered by start.
  void collect(const Sentence& sentence, std::vector<RawMatch>& out) const;

  /// Same, over a sentence already encoded against fillers().
  void collect(const std::vector<TokenFillers>& encoded, std::vector<RawMatch>& out) const;

  const FillerIndex& fillers() const { return fillers_; }
  std::size_t pattern_count() const { return patterns_; }

 private:
  struct Terminal {
    ConstructionId id;
    std::uint32_t length;
  };

  std::uint32_t child(std::uint32_t node, FillerId filler) const;

  FillerIndex fillers_;
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<std::vector<Terminal>> terminals_ = std::vector<std::vector<Terminal>>(1);
  std::size_t patterns_ = 0;
};

struct Match {
  ConstructionId construction_id = 0;
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t length = 0;
  std::string realization;  // space-joined forms of the matched span

  friend bool operator==(const Match&, const Match&) = default;
};

std::string realization_of(const Sentence& sentence, std::size_t start, std::size_t length);

/// Every (construction, start) pair whose slots the tokens satisfy;
/// overlapping matches are all reported.
std::vector<Match> match_sentence(const Grammar& grammar, const Sentence& sentence, std::size_t sentence_index = 0);
std::vector<Match> match_sentence(const PatternIndex& index, const Sentence& sentence, std::size_t sentence_index = 0);

std::vector<Match> match_corpus(const Grammar& grammar, const EncodedCorpus& corpus, unsigned threads = 1);

struct ProfileEntry {
  ConstructionId id = 0;
  std::uint64_t tokens = 0;
  double per_million = 0.0;
  std::uint64_t types = 0;  // distinct realizations
};

/// Token frequency and type productivity of every construction in one corpus.
struct FrequencyProfile {
  std::string label;
  std::size_t word_count = 0;
  std::uint64_t grammar_fingerprint = 0;
  std::vector<ProfileEntry> entries;  // grammar order; zero rows included

  const ProfileEntry* find(ConstructionId id) const;
};

FrequencyProfile profile_corpus(const Grammar& grammar, const EncodedCorpus& corpus, std::string label = {},
                                unsigned threads = 1);

/// Distinct realizations with counts, by count descending then text.
std::vector<std::pair<std::string, std::uint64_t>> realizations(const Grammar& grammar, const EncodedCorpus& corpus,
                                                                ConstructionId id);

/// JSONL `{"cid":…,"sent":…,"start":…,"text":…}`.
void write_matches_jsonl(const std::vector<Match>& matches, std::ostream& out);

/// TSV `cid tokens tokens_per_million types` with `# label=`, `# words=` and
/// `# grammar=` comment lines.
void write_profile_tsv(const FrequencyProfile& profile, std::ostream& out);
FrequencyProfile parse_profile_tsv(std::istream& in, const std::string& source = "<stream>");
FrequencyProfile read_profile_tsv(const std::filesystem::path& path);

}  // namespace cxg
