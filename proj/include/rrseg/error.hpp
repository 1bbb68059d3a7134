#pragma once

#include <stdexcept>
#include <string>

namespace rrseg {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Decode,
  DegenerateSample,
  NoModel,
  NumericalDegeneracy,
  UnreachableConfidence,
  Usage,
  GenerationFailed,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type thrown by every rrseg routine. The C API maps `code()` onto
/// its status enum one-to-one.
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

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::InvalidArgument, message);
}

}  // namespace rrseg
