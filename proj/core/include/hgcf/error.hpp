#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hgcf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: unreadable files, malformed records, invalid configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InputError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A resource limit configured by the caller was exceeded (e.g. item-item pair budget).
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Numerical failure during training (non-finite loss or gradients).
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace hgcf
