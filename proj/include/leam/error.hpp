#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A precondition on an argument value was violated.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A computation produced or was fed a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input whose content is inconsistent (unknown label, empty file, mode mismatch).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace leam
