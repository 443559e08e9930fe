#pragma once

// Maps, operators and distances on the rotation group SO(3).
//
// Every function here is a pure function on value types.

#include <Eigen/Core>

namespace so3filter {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

namespace tol {
inline constexpr double kOrthonormality = 1e-9;  // ||R^T R - I||_max, |det R - 1|
inline constexpr double kAntisymmetry = 1e-9;    // ||M + M^T||_max accepted by vex
inline constexpr double kSymmetry = 1e-9;        // ||M - M^T||_max for weighting matrices
inline constexpr double kUnitAxis = 1e-12;       // | ||u|| - 1 | for angle-axis
inline constexpr double kNearPi = 1e-6;          // Tr{R} must exceed -1 + kNearPi to invert Rodriguez
inline constexpr double kSmallAngle = 1e-8;      // series branch of exp_map
inline constexpr double kGimbal = 1e-6;          // |pitch| < pi/2 - kGimbal
}  // namespace tol

/// Attitude matrix with the SO(3) invariant checked on construction.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Throws Error(InvalidArgument) unless ||m^T m - I||_max <= tolerance and |det m - 1| <= tolerance.
  explicit Rotation(const Mat3& m, double tolerance = tol::kOrthonormality);

  /// Wraps a matrix already known to be a rotation (products of rotations, closed-form maps).
  static Rotation trusted(const Mat3& m) noexcept {
    Rotation r;
    r.m_ = m;
    return r;
  }

  static Rotation identity() noexcept { return Rotation(); }

  const Mat3& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const noexcept { return m_(row, col); }

  Rotation transpose() const noexcept { return trusted(m_.transpose()); }
  Rotation inverse() const noexcept { return transpose(); }
  double trace() const noexcept { return m_.trace(); }

  /// max |(R^T R - I)_ij|
  double orthonormality_error() const noexcept;

  Rotation operator*(const Rotation& rhs) const noexcept { return trusted(m_ * rhs.m_); }
  Vec3 operator*(const Vec3& v) const noexcept { return m_ * v; }

  friend bool operator==(const Rotation& a, const Rotation& b) noexcept { return a.m_ == b.m_; }

 private:
  Mat3 m_;
};

struct AngleAxis {
  double angle = 0.0;  // rad
  Vec3 axis = Vec3::UnitX();
};

/// [v]_x, so that skew(v) * w == v.cross(w).
Mat3 skew(const Vec3& v) noexcept;

/// Inverse of skew. Throws Error(NotAntisymmetric) if ||m + m^T||_max > tolerance;
/// otherwise returns the vector of the antisymmetric part of m.
Vec3 vex(const Mat3& m, double tolerance = tol::kAntisymmetry);

/// Anti-symmetric projection (a - a^T) / 2.
Mat3 pa(const Mat3& a) noexcept;

/// vex(pa(a)).
Vec3 phi(const Mat3& a) noexcept;

/// Normalised Euclidean distance (1/4) Tr{I - R}, in [0, 1].
double ecl_dist(const Rotation& r) noexcept;

/// (1/4) Tr{M (I - R)}; m must be symmetric (Error(NotSymmetric) otherwise).
double weighted_dist(const Mat3& m, const Rotation& r, double tolerance = tol::kSymmetry);

/// I + sin(a)[u]_x + (1 - cos(a))[u]_x^2. Throws Error(NonUnitAxis) if the axis is not unit length.
Rotation from_angle_axis(const AngleAxis& aa, double tolerance = tol::kUnitAxis);

/// ((1 - |rho|^2) I + 2 rho rho^T + 2 [rho]_x) / (1 + |rho|^2).
Rotation from_rodriguez(const Vec3& rho) noexcept;

/// Inverse of from_rodriguez through the Cayley transform [rho]_x = (R - I)(R + I)^{-1}.
/// Throws Error(NearPiRotation) when Tr{R} <= -1 + margin.
Vec3 to_rodriguez(const Rotation& r, double margin = tol::kNearPi);

/// Closed-form exponential of [w]_x.
Rotation exp_map(const Vec3& w) noexcept;

/// Orthogonal polar factor of m (nearest rotation). Throws Error(DegenerateMatrix) if det(m) <= 0.
Rotation reproject(const Mat3& m);

/// ZYX (yaw, pitch, roll) angles in radians, R = Rz(yaw) Ry(pitch) Rx(roll).
/// Throws Error(GimbalLock) when |pitch| >= pi/2 - margin.
Vec3 to_euler_zyx(const Rotation& r, double margin = tol::kGimbal);

/// Recomposes Rz(yaw) Ry(pitch) Rx(roll) from (yaw, pitch, roll).
Rotation from_euler_zyx(const Vec3& ypr) noexcept;

}  // namespace so3filter
