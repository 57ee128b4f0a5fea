#pragma once

#include <stdexcept>
#include <string>

namespace spcdt {

/// Base of every error raised by the toolkit. Input problems (bad files,
/// schema violations, invalid edits) derive from InputError so callers can
/// map them to a user-facing diagnostic without catching logic bugs.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV or tree text. Carries the 1-based line number when known.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : InputError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

class NotFoundError : public InputError {
 public:
  using InputError::InputError;
};

/// An edit that is well-formed but not applicable (threshold on a leaf, ...).
class InvalidEditError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace spcdt
