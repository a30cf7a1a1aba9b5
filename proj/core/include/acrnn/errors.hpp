#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace acrnn {

/// Incompatible tensor or matrix shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation was violated.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested construction would produce nothing (e.g. a window longer than the series).
class EmptyResultError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// Non-finite values or an ill-conditioned system.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training diverged; carries the epoch at which the loss became non-finite.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, int epoch)
      : std::runtime_error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// A cell of an input file could not be parsed. Row and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : std::runtime_error(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

/// Structural problem in an input file (ragged rows, bad header, wrong magic).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Renders a shape as "[2x3x4]" for diagnostics.
std::string shape_string(std::span<const std::size_t> shape);

}  // namespace acrnn
