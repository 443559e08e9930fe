#include "so3filter/measurement.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <numeric>
#include <sstream>

#include "so3filter/errors.hpp"

namespace so3filter {

namespace {

bool nearly_collinear(const Vec3& a, const Vec3& b) {
  const double c = a.normalized().dot(b.normalized());
  return std::abs(c) >= 1.0 - tol::kCollinear;
}

Vec3 unit(const Vec3& v, const char* what) {
  const double n = v.norm();
  if (!(n >= tol::kDegenerateNorm) || !std::isfinite(n)) {
    std::ostringstream os;
    os << what << " vector has norm " << n;
    throw Error(ErrorCode::DegenerateVector, os.str());
  }
  return v / n;
}

void rescale_weights(std::vector<double>& w) {
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& s : w) s *= 3.0 / sum;
}

// sum s_i (R^^T u_I,i) u_B,i^T, the matrix shared by the distance and Upsilon reconstructions.
Mat3 cross_moment(const MeasurementFrame& frame, const Rotation& r_hat) {
  Mat3 acc = Mat3::Zero();
  const Mat3 rt = r_hat.matrix().transpose();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    acc += frame.weight[i] * (rt * frame.inertial[i]) * frame.body[i].transpose();
  }
  return acc;
}

}  // namespace

void ReferenceVectorSet::validate() const {
  if (refs.size() < 2) throw Error(ErrorCode::InvalidArgument, "at least two reference vectors are required");
  for (const auto& r : refs) {
    if (!r.inertial.allFinite() || !r.bias_body.allFinite() || !std::isfinite(r.noise_std) ||
        !std::isfinite(r.weight)) {
      throw Error(ErrorCode::InvalidArgument, "reference vector has non-finite fields");
    }
    if (r.inertial.norm() < tol::kDegenerateNorm) throw Error(ErrorCode::DegenerateVector, "zero inertial vector");
    if (r.noise_std < 0.0) throw Error(ErrorCode::InvalidArgument, "noise_std must be >= 0");
    if (!(r.weight > 0.0)) throw Error(ErrorCode::InvalidArgument, "weights must be > 0");
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size(); ++j) {
      if (!nearly_collinear(refs[i].inertial, refs[j].inertial)) return;
    }
  }
  throw Error(ErrorCode::CollinearPair, "all inertial reference vectors are collinear");
}

std::vector<Vec3> synthesize_body(const Rotation& r_true, const ReferenceVectorSet& refs, RandomStream& rng) {
  std::vector<Vec3> out;
  out.reserve(refs.size());
  const Mat3 rt = r_true.matrix().transpose();
  for (const auto& r : refs.refs) {
    // Always draw, so the stream position does not depend on the noise level.
    const Vec3 xi = rng.normal3();
    out.push_back(rt * r.inertial + r.bias_body + r.noise_std * xi);
  }
  return out;
}

MeasurementFrame normalize_frame(std::span<const Vec3> raw_body, const ReferenceVectorSet& refs) {
  if (raw_body.size() != refs.size()) {
    throw Error(ErrorCode::InvalidArgument, "body vector count does not match reference count");
  }
  MeasurementFrame f;
  f.inertial.reserve(refs.size());
  f.body.reserve(refs.size());
  f.weight.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    f.inertial.push_back(unit(refs.refs[i].inertial, "inertial"));
    f.body.push_back(unit(raw_body[i], "body"));
    f.weight.push_back(refs.refs[i].weight);
  }
  rescale_weights(f.weight);
  return f;
}

MeasurementFrame augment_cross(const MeasurementFrame& frame) {
  if (frame.size() != 2) return frame;
  if (nearly_collinear(frame.inertial[0], frame.inertial[1])) {
    throw Error(ErrorCode::CollinearPair, "inertial pair is collinear");
  }
  if (nearly_collinear(frame.body[0], frame.body[1])) {
    throw Error(ErrorCode::CollinearPair, "body pair is collinear");
  }
  MeasurementFrame out = frame;
  out.inertial.push_back(frame.inertial[0].cross(frame.inertial[1]).normalized());
  out.body.push_back(frame.body[0].cross(frame.body[1]).normalized());
  out.weight.push_back(0.5 * (frame.weight[0] + frame.weight[1]));
  rescale_weights(out.weight);
  return out;
}

InertialMatrix inertial_matrix(const MeasurementFrame& frame) {
  InertialMatrix out;
  out.m = Mat3::Zero();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    out.m += frame.weight[i] * frame.inertial[i] * frame.inertial[i].transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(out.m, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > tol::kRank)) {
    std::ostringstream os;
    os << "M^I is rank deficient (min eigenvalue " << eig.eigenvalues().minCoeff() << ")";
    throw Error(ErrorCode::RankDeficient, os.str());
  }
  out.m_bar = out.m.trace() * Mat3::Identity() - out.m;
  out.m_inv = out.m.inverse();
  const Eigen::SelfAdjointEigenSolver<Mat3> eig_bar(out.m_bar, Eigen::EigenvaluesOnly);
  out.lambda_min = eig_bar.eigenvalues().cwiseAbs().minCoeff();
  return out;
}

Mat3 body_matrix(const MeasurementFrame& frame) {
  Mat3 m = Mat3::Zero();
  for (std::size_t i = 0; i < frame.size(); ++i) m += frame.weight[i] * frame.body[i] * frame.body[i].transpose();
  return m;
}

Vec3 phi_from_vectors(const MeasurementFrame& frame, const Rotation& r_hat) {
  Vec3 acc = Vec3::Zero();
  const Mat3 rt = r_hat.matrix().transpose();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    acc += 0.5 * frame.weight[i] * frame.body[i].cross(rt * frame.inertial[i]);
  }
  return r_hat * acc;
}

double dist_from_vectors(const MeasurementFrame& frame, const Rotation& r_hat) {
  const Mat3& rh = r_hat.matrix();
  return 0.75 - 0.25 * (rh * cross_moment(frame, r_hat) * rh.transpose()).trace();
}

double upsilon_from_vectors(const MeasurementFrame& frame, const InertialMatrix& mats, const Rotation& r_hat) {
  const Mat3& rh = r_hat.matrix();
  return (mats.m_inv * (rh * cross_moment(frame, r_hat) * rh.transpose())).trace();
}

double upsilon_from_vectors(const MeasurementFrame& frame, const Rotation& r_hat) {
  Mat3 m = Mat3::Zero();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    m += frame.weight[i] * frame.inertial[i] * frame.inertial[i].transpose();
  }
  Mat3 inv;
  bool invertible = false;
  double det = 0.0;
  m.computeInverseAndDetWithCheck(inv, det, invertible, tol::kRank);
  if (!invertible) throw Error(ErrorCode::SingularMatrix, "M^I is singular");
  InertialMatrix mats;
  mats.m = m;
  mats.m_inv = inv;
  return upsilon_from_vectors(frame, mats, r_hat);
}

}  // namespace so3filter
