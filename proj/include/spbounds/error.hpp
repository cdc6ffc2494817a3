#ifndef SPBOUNDS_ERROR_HPP
#define SPBOUNDS_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace spbounds {

enum class ErrorCode {
  NonFinite,
  ConvergenceFailure,
  DimensionMismatch,
  EmptySubspace,
  NotSymmetric,
  NotPsd,
  RankDeficientConstraint,
  SingularK,
  RankAssumptionViolated,
  RankTooLow,
  ZeroAngle,
  AugmentedBlockSingular,
  SingularAugmented,
  ParameterOutOfRange,
  InfeasibleDimensions,
  GenerationFailed,
  SizeCapExceeded,
  ParseError,
  StructureError,
  IoError,
  InvalidConfig,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySubspace: return "EmptySubspace";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::RankDeficientConstraint: return "RankDeficientConstraint";
    case ErrorCode::SingularK: return "SingularK";
    case ErrorCode::RankAssumptionViolated: return "RankAssumptionViolated";
    case ErrorCode::RankTooLow: return "RankTooLow";
    case ErrorCode::ZeroAngle: return "ZeroAngle";
    case ErrorCode::AugmentedBlockSingular: return "AugmentedBlockSingular";
    case ErrorCode::SingularAugmented: return "SingularAugmented";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::InfeasibleDimensions: return "InfeasibleDimensions";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::StructureError: return "StructureError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spbounds

#endif  // SPBOUNDS_ERROR_HPP
