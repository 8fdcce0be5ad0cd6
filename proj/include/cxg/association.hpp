#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cxg/corpus.hpp"
#include "cxg/slot.hpp"

namespace cxg {

using FillerId = std::uint32_t;
inline constexpr FillerId kNoFiller = 0xFFFFFFFFu;

/// Dense ids for the slot fillers observed in a corpus.
class FillerIndex {
 public:
  FillerId intern(const SlotFiller& filler);
  std::optional<FillerId> find(const SlotFiller& filler) const;
  const SlotFiller& at(FillerId id) const { return fillers_[id]; }
  std::size_t size() const { return fillers_.size(); }

 private:
  std::vector<SlotFiller> fillers_;
  std::unordered_map<SlotFiller, FillerId, SlotFillerHash> ids_;
};

/// Per-token filler ids indexed by Level; SEM is kNoFiller for OOV tokens.
using TokenFillers = std::array<FillerId, kLevelCount>;

constexpr std::uint64_t pair_key(FillerId left, FillerId right) {
  return (static_cast<std::uint64_t>(left) << 32) | right;
}

/// Adjacent-pair contingency counts over the pooled filler universe: every
/// in-sentence adjacent position is one observation, and contributes one
/// filler per level on each side.
struct ContingencyCounts {
  std::shared_ptr<FillerIndex> fillers = std::make_shared<FillerIndex>();
  std::unordered_map<std::uint64_t, std::uint64_t> pair_counts;
  std::vector<std::uint64_t> left_totals;   // by FillerId
  std::vector<std::uint64_t> right_totals;  // by FillerId
  std::uint64_t total_pairs = 0;

  std::uint64_t pair_count(const SlotFiller& x, const SlotFiller& y) const;
  std::uint64_t left_total(const SlotFiller& x) const;
  std::uint64_t right_total(const SlotFiller& y) const;
  std::uint64_t pair_count(FillerId x, FillerId y) const;
};

/// Encodes every token of a sentence against `fillers`, interning new fillers.
std::vector<TokenFillers> encode_sentence(const Sentence& sentence, FillerIndex& fillers);

/// Encodes without interning; unknown fillers become kNoFiller.
std::vector<TokenFillers> lookup_sentence(const Sentence& sentence, const FillerIndex& fillers);

ContingencyCounts count_pairs(const EncodedCorpus& corpus);

/// Swaps the roles of left and right fillers.
ContingencyCounts transpose(const ContingencyCounts& counts);

enum class Direction { LR, RL };

/// Cells of the 2x2 table for cue x (left) and outcome y (right).
struct Contingency2x2 {
  double a = 0;  // x then y
  double b = 0;  // x then not y
  double c = 0;  // not x then y
  double d = 0;  // neither
};

/// LR: P(y|x) - P(y|~x). RL: P(x|y) - P(x|~y). A conditional with a zero
/// denominator counts as 0.
double delta_p(const Contingency2x2& table, Direction direction);

Contingency2x2 contingency(const ContingencyCounts& counts, FillerId x, FillerId y);

double delta_p(const ContingencyCounts& counts, const SlotFiller& x, const SlotFiller& y, Direction direction);

struct AssociationValue {
  double lr = 0.0;
  double rl = 0.0;
};

/// Both ΔP directions for every adjacent pair seen at least `min_pair_freq`
/// times. Absent pairs read as 0.
struct AssociationMatrix {
  std::shared_ptr<const FillerIndex> fillers;
  std::unordered_map<std::uint64_t, AssociationValue> values;
  std::uint64_t min_pair_freq = 1;

  double lr(FillerId x, FillerId y) const;
  double rl(FillerId x, FillerId y) const;
  double lr(const SlotFiller& x, const SlotFiller& y) const;
  double rl(const SlotFiller& x, const SlotFiller& y) const;
  std::size_t size() const { return values.size(); }
};

AssociationMatrix build_matrix(const ContingencyCounts& counts, std::uint64_t min_pair_freq);

/// Threshold of `per_million` occurrences scaled to the corpus size, at least 1.
std::uint64_t scaled_min_pair_freq(std::size_t word_count, double per_million = 5.0);

/// TSV rows `level_x value_x level_y value_y dp_lr dp_rl`, sorted by filler.
void write_matrix_tsv(const AssociationMatrix& matrix, std::ostream& out);

}  // namespace cxg
