#pragma once

#include <cstdint>
#include <random>

#include "so3filter/so3.hpp"

namespace so3filter {

/// SplitMix64 finaliser applied to base + golden-ratio * (index + 1).
/// Used for per-trial seeds so a Monte Carlo batch is reproducible from one seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept;

/// Seedable Gaussian source. Each simulated trial owns one; streams are never shared between threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  double normal() { return normal_(engine_); }
  Vec3 normal3() {
    const double x = normal();
    const double y = normal();
    const double z = normal();
    return {x, y, z};
  }

  /// Independent child stream; deterministic in (seed, index).
  RandomStream split(std::uint64_t index) const { return RandomStream(derive_seed(seed_, index)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace so3filter
