#pragma once

#include <stdexcept>
#include <string>

namespace sft {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented invariant (kappa < 1, unknown id, ...).
class SemanticError : public Error {
 public:
  using Error::Error;
};

/// Operands live in different flavors, or a monomial is not allowed in a flavor.
class FlavorError : public Error {
 public:
  using Error::Error;
};

/// apply_d met a generator without an image.
class MissingImageError : public Error {
 public:
  using Error::Error;
};

/// A formal inverse was requested for a series with a weight-0 term.
class IllDefinedSeriesError : public Error {
 public:
  using Error::Error;
};

/// A constructed certificate did not re-verify.
class VerificationError : public Error {
 public:
  using Error::Error;
};

/// Enumeration without any finite bound.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

/// Malformed text; carries a 1-based line/column.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error(what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace sft
