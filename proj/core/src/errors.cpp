#include "mechband/errors.hpp"

namespace mechband {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimensions: return "InvalidDimensions";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonPositiveStep: return "NonPositiveStep";
    case ErrorCode::kNonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kUnderDetermined: return "UnderDetermined";
    case ErrorCode::kNotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::kMissingCache: return "MissingCache";
    case ErrorCode::kSingularNormalMatrix: return "SingularNormalMatrix";
    case ErrorCode::kOracleTooLarge: return "OracleTooLarge";
    case ErrorCode::kNonFiniteState: return "NonFiniteState";
    case ErrorCode::kDiverged: return "Diverged";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

NotPositiveDefinite::NotPositiveDefinite(std::size_t block)
    : Error(ErrorCode::kNotPositiveDefinite,
            "Cholesky failed at block index " + std::to_string(block) +
                " (0-based)"),
      block_(block) {}

}  // namespace mechband
