#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dtiboost {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based; 0 when no line applies.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input too short (or otherwise degenerate) for the requested computation.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A precondition on arguments or configuration does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A required identifier has no associated data.
class MissingDataError : public Error {
 public:
  MissingDataError(const std::string& what, std::string id) : Error(what), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class UnavailableError : public Error {
 public:
  using Error::Error;
};

class RemoteError : public Error {
 public:
  RemoteError(const std::string& what, int status) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Model or data file unreadable, truncated or from an unsupported version.
class FormatError : public Error {
 public:
  using Error::Error;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dtiboost
