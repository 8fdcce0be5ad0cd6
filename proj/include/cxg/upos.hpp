#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cxg {

/// Universal part-of-speech tagset (17 tags).
enum class Upos : std::uint8_t {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM,
  PART, PRON, PROPN, PUNCT, SCONJ, SYM, VERB, X
};

inline constexpr std::size_t kUposCount = 17;

inline constexpr std::array<std::string_view, kUposCount> kUposNames = {
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"};

constexpr std::string_view to_string(Upos tag) {
  return kUposNames[static_cast<std::size_t>(tag)];
}

constexpr std::optional<Upos> parse_upos(std::string_view name) {
  for (std::size_t i = 0; i < kUposCount; ++i)
    if (kUposNames[i] == name) return static_cast<Upos>(i);
  return std::nullopt;
}

}  // namespace cxg
