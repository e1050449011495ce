#include "errors.hpp"

namespace mwl {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::InvalidPMF: return "invalid_pmf";
    case ErrorCode::NonZeroMean: return "nonzero_mean";
    case ErrorCode::ZeroVariance: return "zero_variance";
    case ErrorCode::JumpOverMembrane: return "jump_over_membrane";
    case ErrorCode::InvalidParameter: return "invalid_parameter";
    case ErrorCode::InvalidConfig: return "invalid_config";
    case ErrorCode::BandTooSmall: return "band_too_small";
    case ErrorCode::NoConvergence: return "no_convergence";
    case ErrorCode::SingularSystem: return "singular_system";
    case ErrorCode::DegenerateDenominator: return "degenerate_denominator";
    case ErrorCode::GridBeyondHorizon: return "grid_beyond_horizon";
    case ErrorCode::EmptySample: return "empty_sample";
    case ErrorCode::NonPositiveTime: return "non_positive_time";
    case ErrorCode::IOFailure: return "io_failure";
    case ErrorCode::Internal: return "internal";
  }
  return "unknown";
}

}  // namespace mwl
