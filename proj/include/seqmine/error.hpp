#pragma once

#include <stdexcept>
#include <string>

namespace seqmine {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a precondition (empty symbol, bad threshold...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A file or stream does not follow its declared format.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Internal invariant broken, e.g. a pattern set that is not prefix-closed.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds a hard safety limit (oracle caps).
class LimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqmine
