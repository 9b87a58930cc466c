#pragma once

#include <stdexcept>
#include <string>

namespace fscil {

// Every failure surfaced by the library carries one of these codes. The C API
// maps them onto fscil_status values, the CLI onto exit status 1.
enum class ErrorCode {
  MalformedHeader,
  RowLengthMismatch,
  ValueOutOfRange,
  NonPositiveLayout,
  UnequalNovelSizes,
  SessionOutOfRange,
  AlphaOutOfRange,
  GridTooSmall,
  NoNovelTasks,
  LayoutMismatch,
  UnknownMetric,
  ZeroVector,
  DimMismatch,
  EmptyBatch,
  UnknownClass,
  TooFewSamples,
  KTooLarge,
  NotPSD,
  EmptyEnsemble,
  BadConfig,
  NonFiniteLoss,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fscil
