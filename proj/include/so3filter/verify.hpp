#pragma once

// Randomised property suites behind `so3filter verify`: the so(3) identities,
// the weighted-distance relations, vector-vs-matrix reconstruction equivalence
// and sensor noise statistics.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "so3filter/so3.hpp"

namespace so3filter {

enum class VerifyLevel { fast, full };

struct PropertyResult {
  std::string name;
  std::size_t samples = 0;
  double max_violation = 0.0;  // worst |lhs - rhs| (equalities) or worst lhs - rhs excess (inequalities)
  double tolerance = 0.0;
  std::size_t violations = 0;  // samples beyond tolerance
  double seconds = 0.0;
  bool passed() const noexcept { return violations == 0; }
};

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::fast;
  std::uint64_t seed = 20240521;
  std::size_t samples = 0;  // 0: 1e3 (fast) or 1e5 (full) per algebraic property
  /// Replacement for vex() in every property that goes through Phi; used to check the suite can fail.
  std::function<Vec3(const Mat3&)> vex_override;
  /// Only properties whose name starts with this prefix run (empty = all).
  std::string filter;
};

/// Noise-statistics properties always use 1e5 samples regardless of level.
inline constexpr std::size_t kNoiseSamples = 100000;

std::vector<PropertyResult> run_verification(const VerifyOptions& opts = {});

bool all_passed(const std::vector<PropertyResult>& results) noexcept;

}  // namespace so3filter
