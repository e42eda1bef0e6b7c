#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace delin {

enum class ErrorCode {
  invalid_argument,
  parse,
  validation,
  generation,
  size_limit,
  warm_start_rejected,
  solver_numerics,
  precondition,
  not_found,
  conflict,
  io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse: return "parse_error";
    case ErrorCode::validation: return "validation_error";
    case ErrorCode::generation: return "generation_error";
    case ErrorCode::size_limit: return "size_limit";
    case ErrorCode::warm_start_rejected: return "warm_start_rejected";
    case ErrorCode::solver_numerics: return "solver_numerics";
    case ErrorCode::precondition: return "precondition_failed";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::io: return "io_error";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace delin
