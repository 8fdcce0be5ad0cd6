#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "cxg/categories.hpp"
#include "cxg/corpus.hpp"
#include "cxg/upos.hpp"

namespace cxg {

enum class Level : std::uint8_t { Lex, Syn, Sem };

inline constexpr std::size_t kLevelCount = 3;

constexpr std::string_view to_string(Level level) {
  switch (level) {
    case Level::Lex: return "LEX";
    case Level::Syn: return "SYN";
    case Level::Sem: return "SEM";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view name);

/// A filler at one representation level: a word-form, a UPOS tag or a
/// cluster index. Used both as an observed filler and as a slot-constraint.
class SlotFiller {
 public:
  static SlotFiller lex(std::string form) { return SlotFiller(Level::Lex, std::move(form), Upos::X, kOov); }
  static SlotFiller syn(Upos tag) { return SlotFiller(Level::Syn, {}, tag, kOov); }
  static SlotFiller sem(ClusterId cluster) { return SlotFiller(Level::Sem, {}, Upos::X, cluster); }

  /// The filler a token contributes at `level`; nullopt for an OOV semantic filler.
  static std::optional<SlotFiller> of(const Token& token, Level level);

  /// Builds from the textual value used in grammar files ("being", "AUX", "521").
  static SlotFiller parse(Level level, std::string_view value);

  Level level() const { return level_; }
  const std::string& form() const { return form_; }
  Upos tag() const { return tag_; }
  ClusterId cluster() const { return cluster_; }

  /// Value text without level decoration.
  std::string value_text() const;

  /// Whether a token satisfies this constraint. OOV never satisfies SEM.
  bool satisfied_by(const Token& token) const;

  friend bool operator==(const SlotFiller& a, const SlotFiller& b) {
    if (a.level_ != b.level_) return false;
    switch (a.level_) {
      case Level::Lex: return a.form_ == b.form_;
      case Level::Syn: return a.tag_ == b.tag_;
      case Level::Sem: return a.cluster_ == b.cluster_;
    }
    return false;
  }
  friend std::strong_ordering operator<=>(const SlotFiller& a, const SlotFiller& b);

 private:
  SlotFiller(Level level, std::string form, Upos tag, ClusterId cluster)
      : level_(level), form_(std::move(form)), tag_(tag), cluster_(cluster) {}

  Level level_;
  std::string form_;
  Upos tag_;
  ClusterId cluster_;
};

using SlotConstraint = SlotFiller;

struct SlotFillerHash {
  std::size_t operator()(const SlotFiller& f) const noexcept;
};

}  // namespace cxg
