#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gao {

enum class ErrorCode {
  InvalidArgument,
  DegenerateArc,
  NonPositivePrice,
  NonPositiveStrike,
  SingularL,
  SingularGamma,
  BranchError,
  DegenerateHorizon,
  VanishingPrice,
  VanishingVega,
  SingularIntegral,
  PoleInInterval,
  SingularDenominator,
  DegenerateDesign,
  MissingColumn,
  UnparseableField,
  EmptyInput,
  PDFactorizationFailure,
  UnsupportedContract,
  InvalidCorrelation,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace gao
