#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace so3filter {

enum class ErrorCode {
  NotAntisymmetric,
  NotSymmetric,
  NonUnitAxis,
  NearPiRotation,
  DegenerateMatrix,
  GimbalLock,
  DegenerateVector,
  CollinearPair,
  RankDeficient,
  SingularMatrix,
  NearUnstableSet,
  RhoUnavailable,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  Error(ErrorCode code, const std::string& what, std::size_t step)
      : std::runtime_error(std::string(to_string(code)) + " at step " + std::to_string(step) + ": " + what),
        code_(code),
        detail_(what),
        step_(step) {}

  ErrorCode code() const noexcept { return code_; }

  /// Message without the code / step prefix.
  const std::string& detail() const noexcept { return detail_; }

  /// Integration step at which a simulation aborted, when known.
  std::optional<std::size_t> step() const noexcept { return step_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<std::size_t> step_;
};

}  // namespace so3filter
