#include "so3filter/filter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "so3filter/errors.hpp"

namespace so3filter {

namespace {

void require_outside_unstable_set(double upsilon) {
  if (!(1.0 + upsilon >= tol::kUnstableGuard)) {
    std::ostringstream os;
    os << "1 + Upsilon = " << 1.0 + upsilon << " (attitude error at or near 180 degrees)";
    throw Error(ErrorCode::NearUnstableSet, os.str());
  }
}

Innovation floored(Innovation innov, const FilterGains& gains) {
  if (gains.upsilon_floor > 0.0) innov.upsilon = std::max(innov.upsilon, gains.upsilon_floor - 1.0);
  return innov;
}

FilterState integrate(const FilterState& state, const Vec3& omega_m, const Vec3& w, const Vec3& b_dot,
                      const Vec3& s_dot, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  FilterState next;
  next.r_hat = reproject((exp_map(w * dt) * state.r_hat * exp_map((omega_m - state.b_hat) * dt)).matrix());
  next.b_hat = state.b_hat + b_dot * dt;
  next.sigma_hat = state.sigma_hat + s_dot * dt;
  return next;
}

}  // namespace

void FilterGains::validate() const {
  for (double g : {k_w, k_b, k_sigma, gamma, epsilon}) {
    if (!(g > 0.0) || !std::isfinite(g)) throw Error(ErrorCode::InvalidArgument, "filter gains must be > 0");
  }
  if (!(2.0 * k_w > 1.0)) throw Error(ErrorCode::InvalidArgument, "k_w must exceed 1/2");
  if (!(upsilon_floor >= 0.0) || upsilon_floor > 4.0) {
    throw Error(ErrorCode::InvalidArgument, "upsilon_floor must lie in [0, 4]");
  }
}

Innovation innovation_from_vectors(const MeasurementFrame& frame, const InertialMatrix& mats,
                                   const Rotation& r_hat) {
  return {phi_from_vectors(frame, r_hat), dist_from_vectors(frame, r_hat),
          upsilon_from_vectors(frame, mats, r_hat)};
}

Innovation innovation_from_error(const InertialMatrix& mats, const Rotation& r_tilde) {
  const Mat3 mr = mats.m * r_tilde.matrix();
  return {phi(mr), weighted_dist(mats.m, r_tilde), (mats.m_inv * mr).trace()};
}

Vec3 correction_w(const Innovation& innov, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains) {
  require_outside_unstable_set(innov.upsilon);
  const double lam = mats.lambda_min;
  const double one_u = 1.0 + innov.upsilon;
  const double shaping = (one_u * one_u * lam * lam + 1.0) / one_u;
  const Vec3 body_phi = state.r_hat.matrix().transpose() * innov.phi;
  return gains.k_w / (gains.epsilon * lam) * shaping * innov.phi +
         state.r_hat * body_phi.cwiseProduct(state.sigma_hat) / (lam * one_u);
}

Vec3 correction_w(const MeasurementFrame& frame, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains) {
  return correction_w(innovation_from_vectors(frame, mats, state.r_hat), state, mats, gains);
}

Vec3 bias_update(const Innovation& innov, const FilterState& state, const InertialMatrix& /*mats*/,
                 const FilterGains& gains) {
  const Vec3 body_phi = state.r_hat.matrix().transpose() * innov.phi;
  return -gains.gamma * innov.dist * body_phi - gains.gamma * gains.k_b * state.b_hat;
}

Vec3 bias_update(const MeasurementFrame& frame, const FilterState& state, const InertialMatrix& mats,
                 const FilterGains& gains) {
  return bias_update(innovation_from_vectors(frame, mats, state.r_hat), state, mats, gains);
}

Vec3 sigma_update(const Innovation& innov, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains) {
  require_outside_unstable_set(innov.upsilon);
  const Vec3 body_phi = state.r_hat.matrix().transpose() * innov.phi;
  const double scale = gains.gamma * innov.dist / (mats.lambda_min * (1.0 + innov.upsilon));
  return scale * body_phi.cwiseAbs2() - gains.gamma * gains.k_sigma * state.sigma_hat;
}

Vec3 sigma_update(const MeasurementFrame& frame, const FilterState& state, const InertialMatrix& mats,
                  const FilterGains& gains) {
  return sigma_update(innovation_from_vectors(frame, mats, state.r_hat), state, mats, gains);
}

FilterState filter_step(const FilterState& state, const Vec3& omega_m, const Innovation& innov,
                        const InertialMatrix& mats, const FilterGains& gains, double dt) {
  const Innovation used = floored(innov, gains);
  const Vec3 w = correction_w(used, state, mats, gains);
  const Vec3 b_dot = bias_update(used, state, mats, gains);
  const Vec3 s_dot = sigma_update(used, state, mats, gains);
  return integrate(state, omega_m, w, b_dot, s_dot, dt);
}

FilterState filter_step(const FilterState& state, const Vec3& omega_m, const MeasurementFrame& frame,
                        const InertialMatrix& mats, const FilterGains& gains, double dt) {
  return filter_step(state, omega_m, innovation_from_vectors(frame, mats, state.r_hat), mats, gains, dt);
}

FilterState baseline_step(const FilterState& state, const Vec3& omega_m, const Innovation& innov,
                          const InertialMatrix& mats, const FilterGains& gains, double dt) {
  const Vec3 w = gains.k_w * innov.phi;
  const Vec3 b_dot = bias_update(innov, state, mats, gains);
  return integrate(state, omega_m, w, b_dot, Vec3::Zero(), dt);
}

FilterState baseline_step(const FilterState& state, const Vec3& omega_m, const MeasurementFrame& frame,
                          const InertialMatrix& mats, const FilterGains& gains, double dt) {
  return baseline_step(state, omega_m, innovation_from_vectors(frame, mats, state.r_hat), mats, gains, dt);
}

ErrorTriple error_triple(const TrueState& truth, const FilterState& state, const GyroModel& gyro,
                         const SigmaBound& sigma) {
  ErrorTriple err;
  err.r_tilde = truth.r * state.r_hat.transpose();
  if (err.r_tilde.trace() > -1.0 + tol::kNearPi) err.rho_tilde = to_rodriguez(err.r_tilde);
  err.b_tilde = gyro.bias - state.b_hat;
  err.sigma_tilde = sigma.sigma - state.sigma_hat;
  return err;
}

double potential_v(const ErrorTriple& err, const InertialMatrix& mats, const FilterGains& gains) {
  if (!err.rho_tilde) throw Error(ErrorCode::RhoUnavailable, "attitude error has no Rodriguez vector");
  const Vec3& rho = *err.rho_tilde;
  const double q = rho.dot(mats.m_bar * rho) / (1.0 + rho.squaredNorm());
  return 0.25 * q * q + (err.b_tilde.squaredNorm() + err.sigma_tilde.squaredNorm()) / (2.0 * gains.gamma);
}

}  // namespace so3filter
