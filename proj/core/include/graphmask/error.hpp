#pragma once

#include <stdexcept>
#include <string>

namespace graphmask {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input violates a type invariant (asymmetric weights, self-loop, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A metric is not defined for the given input (empty edge set, zero norm).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

/// The optimization problem has no feasible point.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Solver or factorization failure.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. `line()` is 1-based, 0 when not line-specific.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace graphmask
