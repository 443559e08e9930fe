#pragma once

// Independent reference computations for the tests. Nothing here calls into the
// library: rotations come from unit quaternions, cross products and traces are
// written out by hand, so agreement with the library is a real cross-check.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

using V3 = std::array<double, 3>;
using M3 = std::array<std::array<double, 3>, 3>;

inline V3 cross(const V3& a, const V3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const V3& a) { return std::sqrt(dot(a, a)); }
inline V3 scale(const V3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline M3 mul(const M3& a, const M3& b) {
  M3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}
inline V3 mul(const M3& a, const V3& v) {
  V3 out{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) out[i] += a[i][k] * v[k];
  return out;
}
inline M3 transpose(const M3& a) {
  M3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}
inline double trace(const M3& a) { return a[0][0] + a[1][1] + a[2][2]; }

/// Rotation matrix of the unit quaternion (w, x, y, z).
inline M3 quat_to_matrix(double w, double x, double y, double z) {
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)},
           {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)},
           {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)}}};
}

/// Rotation by `angle` about unit `axis`, through the half-angle quaternion.
inline M3 axis_angle(double angle, const V3& axis) {
  const double s = std::sin(angle / 2.0);
  return quat_to_matrix(std::cos(angle / 2.0), axis[0] * s, axis[1] * s, axis[2] * s);
}

/// Rodriguez vector rho = tan(theta/2) u of the quaternion: vector part / scalar part.
inline M3 from_rodriguez(const V3& rho) {
  const double w = 1.0 / std::sqrt(1.0 + dot(rho, rho));
  return quat_to_matrix(w, rho[0] * w, rho[1] * w, rho[2] * w);
}

/// vex of the antisymmetric part, component by component.
inline V3 phi(const M3& a) {
  return {0.5 * (a[2][1] - a[1][2]), 0.5 * (a[0][2] - a[2][0]), 0.5 * (a[1][0] - a[0][1])};
}

/// Deterministic sampler for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  V3 vec() { return {normal(), normal(), normal()}; }
  V3 unit() {
    V3 v = vec();
    while (norm(v) < 1e-3) v = vec();
    return scale(v, 1.0 / norm(v));
  }
  /// Uniformly distributed rotation (Shoemake's method).
  M3 rotation() {
    const double u1 = uniform(0, 1), u2 = uniform(0, 2 * M_PI), u3 = uniform(0, 2 * M_PI);
    const double a = std::sqrt(1 - u1), b = std::sqrt(u1);
    return quat_to_matrix(a * std::sin(u2), a * std::cos(u2), b * std::sin(u3), b * std::cos(u3));
  }
  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace oracle
