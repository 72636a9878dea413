#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wsd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Instance data that does not fit a declared schema (unknown variable or value).
class SchemaError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Raised when an interaction graph is not chordal.
class DecomposabilityError : public Error {
 public:
  using Error::Error;
};

// A request exceeds a hard capability limit, e.g. exhaustive search over too many variables.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace wsd
