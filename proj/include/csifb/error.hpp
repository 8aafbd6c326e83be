#pragma once

#include <stdexcept>
#include <string>

namespace csifb {

enum class ErrorCode {
  InvalidArgument,
  NotHermitian,
  IndefiniteMatrix,
  DomainError,
  InvalidCorrelation,
  TierLevelsNotOrdered,
  DuplicateSubcarrier,
  IndexOutOfRange,
  DimensionMismatch,
  SingularSystem,
  SingularCovariance,
  DistortionOutOfRange,
  DistortionBelowMmse,
  BudgetNonpositive,
  PreconditionViolated,
  RankMismatch,
  TooManySkipped,
  ParseError,
  IoError,
  NumericalFailure,
};

/// Library-wide exception type; every throwing operation uses it so callers
/// (and the C bindings) can map failures to a stable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

const char* error_code_name(ErrorCode code);

}  // namespace csifb
