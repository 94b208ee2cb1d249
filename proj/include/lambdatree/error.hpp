#pragma once

#include <stdexcept>
#include <string>

namespace lambdatree {

/// Malformed tree or labeling input. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// An internal consistency check failed (a bug, never a property of the input).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A caller broke a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace lambdatree
