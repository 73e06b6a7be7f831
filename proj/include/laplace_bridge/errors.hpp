#pragma once

#include <stdexcept>
#include <string>

namespace lbridge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation
/// (non-positive shape, zero variance, probability outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix sizes that do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Class index out of range.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Covariance that is not symmetric PSD within tolerance.
class DecompositionError : public Error {
 public:
  using Error::Error;
};

/// Group assignment that is not a partition of the class indices.
class PartitionError : public Error {
 public:
  using Error::Error;
};

/// Empty batch or list where at least one element is required.
class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or command configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input record. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lbridge
