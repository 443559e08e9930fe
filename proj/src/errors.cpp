#include "so3filter/errors.hpp"

namespace so3filter {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotAntisymmetric: return "NotAntisymmetric";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NonUnitAxis: return "NonUnitAxis";
    case ErrorCode::NearPiRotation: return "NearPiRotation";
    case ErrorCode::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorCode::GimbalLock: return "GimbalLock";
    case ErrorCode::DegenerateVector: return "DegenerateVector";
    case ErrorCode::CollinearPair: return "CollinearPair";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NearUnstableSet: return "NearUnstableSet";
    case ErrorCode::RhoUnavailable: return "RhoUnavailable";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace so3filter
