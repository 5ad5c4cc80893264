#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crisis {

enum class ErrorKind {
  validation,
  encoding,
  parse,
  io,
  backend,
};

const char* to_string(ErrorKind kind);

/// Base of every error the library throws. The kind drives CLI exit codes
/// and HTTP status mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorKind::validation, message) {}
};

class EncodingError : public Error {
 public:
  explicit EncodingError(const std::string& message)
      : Error(ErrorKind::encoding, message) {}
};

/// Malformed input. `line` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error(ErrorKind::io, message) {}
};

class BackendError : public Error {
 public:
  explicit BackendError(const std::string& message)
      : Error(ErrorKind::backend, message) {}
};

}  // namespace crisis
