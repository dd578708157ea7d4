#pragma once

#include <stdexcept>
#include <string>

namespace posdecomp {

/// Bad arguments or preconditions (maps to CLI exit code 2).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number of the offending line.
class FormatError : public std::runtime_error {
public:
  FormatError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

/// A hypothesis of the decomposition fails on the given data (exit code 1).
class HypothesisViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A checked numerical invariant does not hold (exit code 1).
class InvariantViolation : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace posdecomp
