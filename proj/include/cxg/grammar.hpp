#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cxg/slot.hpp"

namespace cxg {

using ConstructionId = std::int64_t;

inline constexpr std::size_t kMinSlots = 3;

using SlotSequence = std::vector<SlotConstraint>;

struct SlotSequenceHash {
  std::size_t operator()(const SlotSequence& slots) const noexcept;
};

struct Construction {
  ConstructionId id = 0;
  SlotSequence slots;
  double weight = 1.0;  // activation weight, only used by exposure pruning

  std::size_t size() const { return slots.size(); }
};

/// A constructicon: unique ids and unique slot sequences.
class Grammar {
 public:
  /// Throws ValidationError on a duplicate id or slot sequence, fewer than
  /// kMinSlots slots, or a weight outside [0, 1].
  void add(Construction construction);

  const std::vector<Construction>& constructions() const { return constructions_; }
  const Construction* find(ConstructionId id) const;
  bool contains(const SlotSequence& slots) const { return sequences_.count(slots) != 0; }
  std::size_t size() const { return constructions_.size(); }
  bool empty() const { return constructions_.empty(); }

  auto begin() const { return constructions_.begin(); }
  auto end() const { return constructions_.end(); }

  /// Parameters the grammar was learned with (echoed into reports).
  std::map<std::string, std::string> config;

 private:
  std::vector<Construction> constructions_;
  std::unordered_map<ConstructionId, std::size_t> by_id_;
  std::unordered_set<SlotSequence, SlotSequenceHash> sequences_;
};

/// Dash notation, e.g. `AUX -- "being" -- VERB -- <521>`.
std::string to_notation(const SlotSequence& slots);
inline std::string to_notation(const Construction& c) { return to_notation(c.slots); }

/// Inverse of to_notation; also accepts lowercase tag names.
SlotSequence parse_notation(std::string_view notation);

/// One JSON object per line:
/// `{"id":…,"weight":…,"slots":[{"level":"LEX|SYN|SEM","value":"…"}]}`.
void write_grammar(const Grammar& grammar, std::ostream& out);
Grammar parse_grammar(std::istream& in, const std::string& source = "<stream>");
Grammar read_grammar(const std::filesystem::path& path);

/// Order-independent hash over (id, slots) pairs; identifies the grammar a
/// profile was computed with.
std::uint64_t fingerprint(const Grammar& grammar);

}  // namespace cxg
