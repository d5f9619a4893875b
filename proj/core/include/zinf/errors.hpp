#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace zinf {

enum class ErrorKind {
  InvalidParameter,
  Domain,
  Infeasible,
  NoSolution,
  DimensionMismatch,
  NonFinite,
  NonConvergence,
  Parse,
  NegativeCount,
  MissingColumn,
  TooFewObservations,
  Unsupported,
  EmptyPositiveCell,
  EmptyData,
  SingularHessian,
  Mismatch,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. The kind is stable and
/// is what the CLI maps onto exit codes and error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// CSV/number parse failure; row is 1-based counting the header as row 1.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& what)
      : Error(ErrorKind::Parse, what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace zinf
