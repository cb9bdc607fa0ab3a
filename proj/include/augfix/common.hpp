#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

namespace augfix {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed textual input: usage-language source or a JSON document.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Well-formed input that violates a contract (degenerate rule, empty
// pattern, semantically equal versions, invalid graph document, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// A configurable resource limit was hit before an answer was found.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// Cooperative wall-clock limit. Default-constructed deadlines never expire.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  Deadline() = default;

  static Deadline after(std::chrono::milliseconds d) {
    return Deadline(Clock::now() + d);
  }

  bool expired() const { return Clock::now() >= at_; }

 private:
  explicit Deadline(Clock::time_point at) : at_(at) {}
  Clock::time_point at_ = Clock::time_point::max();
};

}  // namespace augfix
