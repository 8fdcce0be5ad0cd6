#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cxg {

/// Malformed or invalid user input (files, labels, flags). The CLI maps
/// these to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A row that cannot be parsed; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed input whose content violates a domain rule (unknown tag,
/// unknown category, duplicate id).
class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace cxg
