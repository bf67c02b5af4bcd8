#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace imt {

// Base for every error raised by the library. The CLI maps these to exit
// code 2 (data error); argument problems are reported separately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A call made with arguments that break its documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Scorer backend failed or returned a distribution violating its contract.
class ScorerError : public Error {
 public:
  using Error::Error;
};

}  // namespace imt
