#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mechband {

enum class ErrorCode {
  kInvalidDimensions,
  kShapeMismatch,
  kNonPositiveStep,
  kNonPositiveWeight,
  kNonFiniteInput,
  kUnderDetermined,
  kNotPositiveDefinite,
  kMissingCache,
  kSingularNormalMatrix,
  kOracleTooLarge,
  kNonFiniteState,
  kDiverged,
  kInvalidArgument,
  kParseError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a stable code; the message
// starts with the code name so CLI output names the failed invariant.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the blocked factorization when the Schur complement of a
// diagonal block is not positive definite. `block()` is 0-based.
class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t block);

  std::size_t block() const noexcept { return block_; }

 private:
  std::size_t block_;
};

}  // namespace mechband
