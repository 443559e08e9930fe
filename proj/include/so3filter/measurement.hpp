#pragma once

// Vector measurement model: body-frame observation synthesis, normalisation,
// weighted inertial matrices and the measurement-only reconstructions of
// Phi(M R~), ||M R~||_I and Upsilon used by the filter.

#include <span>
#include <vector>

#include "so3filter/random.hpp"
#include "so3filter/so3.hpp"

namespace so3filter {

namespace tol {
inline constexpr double kCollinear = 1e-6;    // |cos angle| >= 1 - kCollinear is degenerate
inline constexpr double kDegenerateNorm = 1e-9;
inline constexpr double kRank = 1e-9;         // min eigenvalue of M^I
inline constexpr double kWeightSum = 1e-12;
}  // namespace tol

/// One known inertial reference direction and how its body-frame reading is corrupted.
struct ReferenceVector {
  Vec3 inertial;
  Vec3 bias_body = Vec3::Zero();
  double noise_std = 0.0;  // isotropic per-axis standard deviation
  double weight = 1.0;     // confidence s_i > 0, rescaled so the set sums to 3
};

/// n >= 2 references with at least one non-collinear pair.
struct ReferenceVectorSet {
  std::vector<ReferenceVector> refs;

  std::size_t size() const noexcept { return refs.size(); }

  /// Throws Error(InvalidArgument / CollinearPair / DegenerateVector) if the invariants fail.
  void validate() const;
};

/// Unit inertial/body pairs with weights summing to 3.
struct MeasurementFrame {
  std::vector<Vec3> inertial;
  std::vector<Vec3> body;
  std::vector<double> weight;

  std::size_t size() const noexcept { return inertial.size(); }
};

/// M^I = sum s_i u_i u_i^T together with the quantities the filter derives from it.
struct InertialMatrix {
  Mat3 m;        // M^I
  Mat3 m_bar;    // Tr{M^I} I - M^I
  Mat3 m_inv;    // (M^I)^{-1}
  double lambda_min = 0.0;  // minimum singular value of m_bar
};

/// v_B,i = R^T v_I,i + b_B,i + w_i, w_i ~ N(0, std_i^2 I). Draws three normals per reference, in order.
std::vector<Vec3> synthesize_body(const Rotation& r_true, const ReferenceVectorSet& refs, RandomStream& rng);

/// Normalises inertial and raw body vectors and rescales the weights to sum to 3.
/// Throws Error(DegenerateVector) if any vector has norm below 1e-9.
MeasurementFrame normalize_frame(std::span<const Vec3> raw_body, const ReferenceVectorSet& refs);

/// For a two-vector frame, appends normalised u1 x u2 in both frames (weight = mean of the others)
/// and renormalises the weights. Frames with n != 2 are returned unchanged.
/// Throws Error(CollinearPair) when |cos angle| >= 1 - 1e-6 in either frame.
MeasurementFrame augment_cross(const MeasurementFrame& frame);

/// Throws Error(RankDeficient) if M^I has an eigenvalue <= 1e-9.
InertialMatrix inertial_matrix(const MeasurementFrame& frame);

/// M^B = sum s_i u_B,i u_B,i^T.
Mat3 body_matrix(const MeasurementFrame& frame);

/// Phi(M^I R~) = R^ sum (s_i / 2) u_B,i x (R^^T u_I,i).
Vec3 phi_from_vectors(const MeasurementFrame& frame, const Rotation& r_hat);

/// ||M^I R~||_I = 3/4 - (1/4) Tr{R^ sum s_i (R^^T u_I,i) u_B,i^T R^^T}.
double dist_from_vectors(const MeasurementFrame& frame, const Rotation& r_hat);

/// Upsilon = Tr{(M^I)^{-1} R^ sum s_i (R^^T u_I,i) u_B,i^T R^^T}.
double upsilon_from_vectors(const MeasurementFrame& frame, const InertialMatrix& mats, const Rotation& r_hat);

/// As above, building M^I from the frame. Throws Error(SingularMatrix) if it cannot be inverted.
double upsilon_from_vectors(const MeasurementFrame& frame, const Rotation& r_hat);

}  // namespace so3filter
