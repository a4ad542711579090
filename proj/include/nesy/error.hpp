#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nesy {

/// Malformed input: syntax, undeclared names, domain mismatches, bad parameters.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Position-carrying syntax error. `offset` is a byte offset into the parsed
/// text; what() appends the line and column to `detail`.
class ParseError : public InputError {
 public:
  ParseError(const std::string& detail, std::size_t offset, std::size_t line, std::size_t column)
      : InputError(detail + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        detail_(detail),
        offset_(offset),
        line_(line),
        column_(column) {}

  const std::string& detail() const { return detail_; }
  std::size_t offset() const { return offset_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string detail_;
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
};

/// A computation produced a value that cannot be reported (non-finite Z, F = 0 under log, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nesy
