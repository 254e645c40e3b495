#include "dlnlp/error.hpp"

namespace dlnlp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFiniteData: return "NonFiniteData";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMarginalMismatch: return "MarginalMismatch";
    case ErrorCode::kShiftTooSmall: return "ShiftTooSmall";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kPositivityLost: return "PositivityLost";
    case ErrorCode::kStepUnderflow: return "StepUnderflow";
    case ErrorCode::kMissingSnapshots: return "MissingSnapshots";
    case ErrorCode::kOverflow: return "Overflow";
    case ErrorCode::kKernelUnderflow: return "KernelUnderflow";
    case ErrorCode::kSingularHessian: return "SingularHessian";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kOracleUnavailable: return "OracleUnavailable";
  }
  return "Unknown";
}

}  // namespace dlnlp
