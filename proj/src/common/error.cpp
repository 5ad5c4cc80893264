#include "crisis/common/error.hpp"

namespace crisis {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::encoding: return "encoding";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    case ErrorKind::backend: return "backend";
  }
  return "unknown";
}

namespace {
std::string with_line(const std::string& message, std::size_t line) {
  if (line == 0) return message;
  return "line " + std::to_string(line) + ": " + message;
}
}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line)
    : Error(ErrorKind::parse, with_line(message, line)), line_(line) {}

}  // namespace crisis
