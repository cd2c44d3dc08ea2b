#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evokit {

enum class ErrorKind {
  bounds,
  parameter,
  shape,
  input,
  parse,
  io,
  degenerate,
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library. The kind is
/// surfaced by the CLI in its machine-readable error record.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::bounds: return "bounds";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::shape: return "shape";
    case ErrorKind::input: return "input";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    case ErrorKind::degenerate: return "degenerate";
  }
  return "unknown";
}

}  // namespace evokit
