#pragma once

#include <stdexcept>
#include <string>

namespace colflow {

enum class ErrorCode {
  // instance validation
  NonPositiveExposure,
  NegativeValue,
  DuplicateEdge,
  DanglingEndpoint,
  PartialPriorities,
  InvalidInput,
  // flow / balancing
  InfeasibleFlow,
  LambdaOutOfRange,
  BudgetExceeded,
  NotMaximum,
  TooLarge,
  MissingPriorities,
  // a broken internal invariant, i.e. a bug
  Internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void internal_check(bool ok, const std::string& message) {
  if (!ok) fail(ErrorCode::Internal, message);
}

}  // namespace colflow
