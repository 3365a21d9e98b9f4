#include "dipswitch/error.hpp"

namespace dipswitch {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::SizeLimit: return "size-limit";
    case ErrorCode::InvalidGeometry: return "invalid-geometry";
    case ErrorCode::DegenerateReference: return "degenerate-reference";
    case ErrorCode::InvalidPair: return "invalid-pair";
    case ErrorCode::InvalidDensity: return "invalid-density";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::Io: return "io";
    case ErrorCode::NoConvergence: return "no-convergence";
  }
  return "unknown";
}

}  // namespace dipswitch
