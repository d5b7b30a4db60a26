#include "mmlbn/error.hpp"

namespace mmlbn {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "io";
    case ErrorCode::Format: return "format";
    case ErrorCode::MissingValue: return "missing-value";
    case ErrorCode::DegenerateVariable: return "degenerate-variable";
    case ErrorCode::Argument: return "argument";
    case ErrorCode::Cycle: return "cycle";
    case ErrorCode::ParentCap: return "parent-cap";
    case ErrorCode::NoArc: return "no-arc";
    case ErrorCode::Capacity: return "capacity";
    case ErrorCode::ParameterCap: return "parameter-cap";
    case ErrorCode::Convergence: return "convergence";
  }
  return "unknown";
}

}  // namespace mmlbn
