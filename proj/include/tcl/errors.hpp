#pragma once

#include <stdexcept>
#include <string>

namespace tcl {

/// Input or configuration violates a documented invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input. Carries the 1-based line number when known (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The controller reached a state where its closed forms divide by zero
/// (population fully contracted onto a pivot temperature).
class DegenerateStateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace tcl
