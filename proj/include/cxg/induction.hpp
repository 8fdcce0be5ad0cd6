#pragma once

#include <cstdint>
#include <vector>

#include "cxg/association.hpp"
#include "cxg/corpus.hpp"
#include "cxg/grammar.hpp"

namespace cxg {

struct BeamConfig {
  std::size_t beam_width = 16;
  std::size_t min_len = 3;
  std::size_t max_len = 7;
  double dp_threshold = 0.1;
  std::size_t max_candidates = 20000;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct Candidate {
  SlotSequence slots;
  double mean_dp = 0.0;         // mean ΔP_LR over slot transitions
  std::uint64_t frequency = 0;  // matches in the corpus
  double score = 0.0;           // mean_dp * ln(frequency)
};

/// Seeds a beam with each filler of every token, extends rightward one slot
/// at a time by ΔP_LR(next | last) and keeps the best `beam_width` states per
/// step. An extension scoring below `dp_threshold` is not taken. Every kept
/// state with at least `min_len` slots and a mean transition ΔP above the
/// threshold is a candidate. Candidates are unique and ranked by score.
std::vector<Candidate> beam_search_candidates(const EncodedCorpus& corpus, const AssociationMatrix& matrix,
                                              const BeamConfig& config, unsigned threads = 1);

/// Alphabet sizes for the two-part code.
struct VocabSizes {
  std::size_t lex = 1;
  std::size_t syn = kUposCount;
  std::size_t sem = 1;

  std::size_t at(Level level) const;
};

/// |V_LEX| is the number of distinct forms in the corpus; |V_SEM| is k.
VocabSizes vocab_sizes(const EncodedCorpus& corpus, int clusters);

struct MdlScore {
  double grammar_bits = 0.0;
  double data_bits = 0.0;
  double total = 0.0;
};

/// Per slot log2(3) + log2|V_level|, plus log2(max_len) per construction.
double construction_cost(const SlotSequence& slots, const VocabSizes& vocab, std::size_t max_len);
double grammar_cost(const Grammar& grammar, const VocabSizes& vocab, std::size_t max_len);

/// Greedy left-to-right code: at each position the longest matching
/// construction (ties: higher corpus count, then lower id) costs
/// -log2((count+1)/(sum of counts + |G|)); an uncovered token costs
/// log2(|V_LEX|+1).
double data_cost(const Grammar& grammar, const EncodedCorpus& corpus, const VocabSizes& vocab);

MdlScore mdl_score(const Grammar& grammar, const EncodedCorpus& corpus, const VocabSizes& vocab, std::size_t max_len);

struct Selection {
  Grammar grammar;
  MdlScore score;
  MdlScore baseline;  // empty grammar
};

/// One forward pass in rank order; a candidate is kept iff it strictly
/// lowers the total description length. Construction ids are rank indices.
Selection select_grammar(const std::vector<Candidate>& candidates, const EncodedCorpus& corpus,
                         const VocabSizes& vocab, std::size_t max_len);

/// Exposure-based forgetting. Weights start at 1; a sub-corpus with at least
/// one match resets the weight to 1, one without subtracts `decay`. A
/// construction whose weight reaches 0 is removed.
Grammar prune_by_exposure(const Grammar& grammar, const std::vector<EncodedCorpus>& subcorpora,
                          double decay = 0.25);

}  // namespace cxg
