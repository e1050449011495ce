#pragma once

#include <stdexcept>
#include <string>

namespace mwl {

enum class ErrorCode : int {
  Ok = 0,
  InvalidPMF = 1,
  NonZeroMean = 2,
  ZeroVariance = 3,
  JumpOverMembrane = 4,
  InvalidParameter = 5,
  InvalidConfig = 6,
  BandTooSmall = 7,
  NoConvergence = 8,
  SingularSystem = 9,
  DegenerateDenominator = 10,
  GridBeyondHorizon = 11,
  EmptySample = 12,
  NonPositiveTime = 13,
  IOFailure = 14,
  Internal = 15,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mwl
