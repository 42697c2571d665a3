#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glop {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed an argument outside the documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input data is malformed (CSV parse failures, schema problems, empty files).
class DataError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : DataError(what), row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class EmptyInputError : public DataError {
 public:
  using DataError::DataError;
};

/// A solver produced or encountered a non-finite value, or otherwise failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Problem too large for an exhaustive routine.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Shape the routine does not handle (e.g. unequal patient sizes in the stacked view).
class UnsupportedShapeError : public Error {
 public:
  using Error::Error;
};

/// Query outside the computed range of a path.
class RangeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Every grid cell failed during model selection.
class SelectionError : public Error {
 public:
  using Error::Error;
};

}  // namespace glop
