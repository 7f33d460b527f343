#pragma once

#include <stdexcept>
#include <string>

namespace beliefsim {

enum class ErrorCode {
  NonPositiveEntry,
  RowSumMismatch,
  DimensionMismatch,
  LengthMismatch,
  BetaOutOfRange,
  NotRowStochastic,
  ZeroDiagonal,
  NotStronglyConnected,
  EmptyExpertSet,
  WeightMismatch,
  GenerationBudgetExceeded,
  NotIdentifiable,
  BadConfig,
};

const char* error_code_name(ErrorCode code);

/// Raised when inputs violate a documented model/network/config precondition.
/// CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// File/stream failures; CLI maps these to exit code 1.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace beliefsim
