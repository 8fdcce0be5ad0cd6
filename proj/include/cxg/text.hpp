#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cxg::text {

/// Unicode-aware lowercasing of a UTF-8 string. Invalid byte sequences are
/// passed through unchanged.
std::string to_lower(std::string_view utf8);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Drops one trailing '\r' (CRLF input).
std::string_view chomp(std::string_view line);

std::string_view trim(std::string_view s);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

/// Fixed-point with `digits` decimals.
std::string format_fixed(double value, int digits);

}  // namespace cxg::text
