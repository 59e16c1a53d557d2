#pragma once

#include <stdexcept>
#include <string>

namespace spreadlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (bad number, bad timestamp, bad JSON/CSV row).
/// Carries the 1-based line or row number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, long line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_ = 0;
};

/// Well-formed input that violates a domain invariant (crossed book,
/// non-positive size, unordered config).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / stream problems. Maps to a distinct CLI exit code.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Degenerate numeric situations: no mid price, zero baseline, constant
/// series, empty statistics input.
class ComputeError : public Error {
 public:
  using Error::Error;
};

}  // namespace spreadlab
