#pragma once

#include <stdexcept>
#include <string>

namespace ratmax {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Evaluation at or beyond a pole of the rational function.
class DomainError : public Error {
public:
  using Error::Error;
};

// An LP subproblem failed or a trainer could not produce a model.
class SolverError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

// Iterate left the region where the algorithm is defined (nonpositive denominator).
class StateError : public Error {
public:
  using Error::Error;
};

class DataError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
        row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::size_t column_;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

} // namespace ratmax
