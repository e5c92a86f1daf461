#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tmeval {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the file and 1-based line for context.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

/// A value violated a domain type invariant or an operation precondition.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmeval
