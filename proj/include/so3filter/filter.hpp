#pragma once

// Nonlinear stochastic attitude filter on SO(3) with adaptive gyro-bias and
// covariance-bound estimates, the deterministic baseline built from the
// traditional trace potential, and the error / diagnostic quantities.

#include <optional>

#include "so3filter/dynamics.hpp"
#include "so3filter/measurement.hpp"
#include "so3filter/so3.hpp"

namespace so3filter {

namespace tol {
inline constexpr double kUnstableGuard = 1e-6;  // laws refuse 1 + Upsilon below this
}  // namespace tol

struct FilterGains {
  double k_w = 5.0;
  double k_b = 0.5;
  double k_sigma = 0.5;
  double gamma = 1.0;
  double epsilon = 0.5;
  /// filter_step floors the reconstructed 1 + Upsilon at this value before applying the laws.
  /// Noisy vectors can push the reconstruction below zero near 180 degree errors. 0 disables the floor.
  double upsilon_floor = 1e-3;

  /// Throws Error(InvalidArgument) unless every gain is > 0 and 2 k_w > 1.
  void validate() const;
};

struct FilterState {
  Rotation r_hat;
  Vec3 b_hat = Vec3::Zero();
  Vec3 sigma_hat = Vec3::Zero();
};

/// Phi(M^I R~), ||M^I R~||_I and Upsilon(M^I, R~) for one epoch, however they were obtained.
struct Innovation {
  Vec3 phi = Vec3::Zero();
  double dist = 0.0;
  double upsilon = 3.0;
};

/// Reconstruction from vector measurements only.
Innovation innovation_from_vectors(const MeasurementFrame& frame, const InertialMatrix& mats, const Rotation& r_hat);

/// Same quantities evaluated in matrix space from the true error R~ = R R^^T.
Innovation innovation_from_error(const InertialMatrix& mats, const Rotation& r_tilde);

/// W = k_w/(eps lam) ((1+U)^2 lam^2 + 1)/(1+U) Phi + (1/lam) R^ diag(R^^T Phi) sigma^ / (1+U).
/// Throws Error(NearUnstableSet) if 1 + Upsilon < 1e-6.
Vec3 correction_w(const Innovation& innov, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains);
Vec3 correction_w(const MeasurementFrame& frame, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains);

/// b^_dot = -gamma ||M^I R~||_I R^^T Phi - gamma k_b b^.
Vec3 bias_update(const Innovation& innov, const FilterState& state, const InertialMatrix& mats,
                 const FilterGains& gains);
Vec3 bias_update(const MeasurementFrame& frame, const FilterState& state, const InertialMatrix& mats,
                 const FilterGains& gains);

/// sigma^_dot = (gamma ||M^I R~||_I / lam) diag(R^^T Phi) R^^T Phi / (1+U) - gamma k_sigma sigma^.
/// Throws Error(NearUnstableSet) if 1 + Upsilon < 1e-6.
Vec3 sigma_update(const Innovation& innov, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains);
Vec3 sigma_update(const MeasurementFrame& frame, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains);

/// One step of length dt:
///   R^+ = reproject(exp(W dt) R^ exp((Omega_m - b^) dt)),  b^+ = b^ + b^_dot dt,  sigma^+ = sigma^ + sigma^_dot dt.
FilterState filter_step(const FilterState& state, const Vec3& omega_m, const MeasurementFrame& frame,
                        const InertialMatrix& mats, const FilterGains& gains, double dt);
FilterState filter_step(const FilterState& state, const Vec3& omega_m, const Innovation& innov,
                        const InertialMatrix& mats, const FilterGains& gains, double dt);

/// Deterministic baseline from V = (1/4)Tr{M^I (I - R~)} + |b~|^2/(2 gamma): W = k_w Phi, the same bias law,
/// no covariance adaptation (sigma^ is left untouched). Uses k_w, k_b and gamma from `gains`.
FilterState baseline_step(const FilterState& state, const Vec3& omega_m, const MeasurementFrame& frame,
                          const InertialMatrix& mats, const FilterGains& gains, double dt);
FilterState baseline_step(const FilterState& state, const Vec3& omega_m, const Innovation& innov,
                          const InertialMatrix& mats, const FilterGains& gains, double dt);

struct ErrorTriple {
  Rotation r_tilde;                 // R R^^T
  std::optional<Vec3> rho_tilde;    // empty when Tr{R~} <= -1 + 1e-6
  Vec3 b_tilde = Vec3::Zero();      // b - b^
  Vec3 sigma_tilde = Vec3::Zero();  // sigma - sigma^
};

ErrorTriple error_triple(const TrueState& truth, const FilterState& state, const GyroModel& gyro,
                         const SigmaBound& sigma);

/// V = (1/4)(rho~^T Mbar rho~ / (1 + |rho~|^2))^2 + |b~|^2/(2 gamma) + |sigma~|^2/(2 gamma).
/// Throws Error(RhoUnavailable) when the error has no Rodriguez vector.
double potential_v(const ErrorTriple& err, const InertialMatrix& mats, const FilterGains& gains);

}  // namespace so3filter
