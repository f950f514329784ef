#pragma once

#include <stdexcept>
#include <string>

namespace psmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration (model, run or property files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input that violates a documented precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Problems reading observation data or sample stores.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Text that does not follow a grammar. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace psmc
