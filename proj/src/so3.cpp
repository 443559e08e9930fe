#include "so3filter/so3.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "so3filter/errors.hpp"

namespace so3filter {

namespace {

double max_abs(const Mat3& m) noexcept { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Rotation::Rotation(const Mat3& m, double tolerance) : m_(m) {
  if (!m.allFinite()) throw Error(ErrorCode::InvalidArgument, "rotation has non-finite entries");
  const double ortho = orthonormality_error();
  const double det = m.determinant();
  if (ortho > tolerance || std::abs(det - 1.0) > tolerance) {
    std::ostringstream os;
    os << "matrix is not a rotation (orthonormality error " << ortho << ", det " << det << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

double Rotation::orthonormality_error() const noexcept {
  return max_abs(m_.transpose() * m_ - Mat3::Identity());
}

Mat3 skew(const Vec3& v) noexcept {
  Mat3 m;
  // clang-format off
  m <<  0.0,  -v.z(),  v.y(),
        v.z(),  0.0,  -v.x(),
       -v.y(),  v.x(),  0.0;
  // clang-format on
  return m;
}

Vec3 vex(const Mat3& m, double tolerance) {
  const double asym = max_abs(m + m.transpose());
  if (!(asym <= tolerance)) {
    std::ostringstream os;
    os << "||m + m^T||_max = " << asym << " exceeds " << tolerance;
    throw Error(ErrorCode::NotAntisymmetric, os.str());
  }
  return {0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
}

Mat3 pa(const Mat3& a) noexcept { return 0.5 * (a - a.transpose()); }

Vec3 phi(const Mat3& a) noexcept {
  // vex of the antisymmetric part; exact by construction, no tolerance check needed.
  const Mat3 p = pa(a);
  return {p(2, 1), p(0, 2), p(1, 0)};
}

double ecl_dist(const Rotation& r) noexcept { return 0.25 * (3.0 - r.trace()); }

double weighted_dist(const Mat3& m, const Rotation& r, double tolerance) {
  const double asym = max_abs(m - m.transpose());
  if (!(asym <= tolerance)) {
    std::ostringstream os;
    os << "weighting matrix is not symmetric (||m - m^T||_max = " << asym << ")";
    throw Error(ErrorCode::NotSymmetric, os.str());
  }
  return 0.25 * (m * (Mat3::Identity() - r.matrix())).trace();
}

Rotation from_angle_axis(const AngleAxis& aa, double tolerance) {
  const double n = aa.axis.norm();
  if (!(std::abs(n - 1.0) <= tolerance)) {
    std::ostringstream os;
    os << "axis norm " << n << " is not 1";
    throw Error(ErrorCode::NonUnitAxis, os.str());
  }
  const Mat3 k = skew(aa.axis);
  return Rotation::trusted(Mat3::Identity() + std::sin(aa.angle) * k + (1.0 - std::cos(aa.angle)) * k * k);
}

Rotation from_rodriguez(const Vec3& rho) noexcept {
  const double n2 = rho.squaredNorm();
  const Mat3 m = ((1.0 - n2) * Mat3::Identity() + 2.0 * rho * rho.transpose() + 2.0 * skew(rho)) / (1.0 + n2);
  return Rotation::trusted(m);
}

Vec3 to_rodriguez(const Rotation& r, double margin) {
  if (!(r.trace() > -1.0 + margin)) {
    std::ostringstream os;
    os << "Tr{R} = " << r.trace() << " is within " << margin << " of -1";
    throw Error(ErrorCode::NearPiRotation, os.str());
  }
  const Mat3& m = r.matrix();
  const Mat3 cayley = (m - Mat3::Identity()) * (m + Mat3::Identity()).inverse();
  return phi(cayley);
}

Rotation exp_map(const Vec3& w) noexcept {
  const double theta = w.norm();
  const Mat3 k = skew(w);
  if (theta < tol::kSmallAngle) {
    return Rotation::trusted(Mat3::Identity() + k + 0.5 * k * k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Rotation::trusted(Mat3::Identity() + a * k + b * k * k);
}

Rotation reproject(const Mat3& m) {
  const double det = m.determinant();
  if (!std::isfinite(det) || det <= 0.0) {
    std::ostringstream os;
    os << "cannot project matrix with det " << det << " onto SO(3)";
    throw Error(ErrorCode::DegenerateMatrix, os.str());
  }
  // Scaled Newton iteration for the polar factor: X <- (g X + X^{-T} / g) / 2.
  Mat3 x = m;
  for (int iter = 0; iter < 100; ++iter) {
    const Mat3 inv_t = x.inverse().transpose();
    const double g = std::cbrt(1.0 / std::abs(x.determinant()));
    const Mat3 next = 0.5 * (g * x + inv_t / g);
    const double change = max_abs(next - x);
    x = next;
    if (change < 1e-15) break;
  }
  return Rotation::trusted(x);
}

Vec3 to_euler_zyx(const Rotation& r, double margin) {
  const Mat3& m = r.matrix();
  const double pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  if (!(std::abs(pitch) < std::numbers::pi / 2.0 - margin)) {
    throw Error(ErrorCode::GimbalLock, "pitch is at +/- 90 degrees");
  }
  const double yaw = std::atan2(m(1, 0), m(0, 0));
  const double roll = std::atan2(m(2, 1), m(2, 2));
  return {yaw, pitch, roll};
}

Rotation from_euler_zyx(const Vec3& ypr) noexcept {
  const double cy = std::cos(ypr[0]), sy = std::sin(ypr[0]);
  const double cp = std::cos(ypr[1]), sp = std::sin(ypr[1]);
  const double cr = std::cos(ypr[2]), sr = std::sin(ypr[2]);
  Mat3 rz, ry, rx;
  rz << cy, -sy, 0, sy, cy, 0, 0, 0, 1;
  ry << cp, 0, sp, 0, 1, 0, -sp, 0, cp;
  rx << 1, 0, 0, 0, cr, -sr, 0, sr, cr;
  return Rotation::trusted(rz * ry * rx);
}

}  // namespace so3filter
