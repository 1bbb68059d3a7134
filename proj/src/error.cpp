#include "rrseg/error.hpp"

namespace rrseg {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::Io: return "i/o error";
    case ErrorCode::Decode: return "decode error";
    case ErrorCode::DegenerateSample: return "degenerate sample";
    case ErrorCode::NoModel: return "no model";
    case ErrorCode::NumericalDegeneracy: return "numerical degeneracy";
    case ErrorCode::UnreachableConfidence: return "unreachable confidence";
    case ErrorCode::Usage: return "usage error";
    case ErrorCode::GenerationFailed: return "fixture generation failed";
  }
  return "unknown error";
}

}  // namespace rrseg
