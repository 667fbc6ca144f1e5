#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specseg {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument or configuration value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Reading or writing an external file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV input. Row and column are 1-based; row counts data rows
/// (a skipped header is not counted).
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : IoError(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// A numerical routine failed: non-convergence, singular systems,
/// degenerate spectra.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace specseg
