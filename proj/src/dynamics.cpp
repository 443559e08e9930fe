#include "so3filter/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "so3filter/errors.hpp"

namespace so3filter {

Vec3 Sinusoid3::operator()(double t) const noexcept {
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = offset[i] + amplitude[i] * std::sin(frequency[i] * t + phase[i]);
  return v;
}

AngularVelocitySignal paper_angular_velocity() {
  AngularVelocitySignal s;
  s.amplitude = {1.0, 0.7, 0.5};
  s.frequency = {0.7, 0.5, 0.3};
  s.phase = {0.0, std::numbers::pi, std::numbers::pi / 3.0};
  return s;
}

Vec3 GyroModel::q_at(double t) const noexcept { return q_diag(t).cwiseMax(0.0).cwiseMin(q_max); }

void GyroModel::validate() const {
  if (!bias.allFinite() || !q_diag.offset.allFinite() || !q_diag.amplitude.allFinite() ||
      !q_diag.frequency.allFinite() || !q_diag.phase.allFinite() || !std::isfinite(q_max)) {
    throw Error(ErrorCode::InvalidArgument, "gyro model has non-finite fields");
  }
  if (q_max < 0.0) throw Error(ErrorCode::InvalidArgument, "q_max must be >= 0");
  const Vec3 peak = q_diag.offset + q_diag.amplitude.cwiseAbs();
  if (peak.maxCoeff() > q_max) throw Error(ErrorCode::InvalidArgument, "diffusion schedule exceeds q_max");
}

TrueState propagate_true(const TrueState& state, const Vec3& omega, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  return {reproject((state.r * exp_map(omega * dt)).matrix()), state.t + dt};
}

Vec3 rodriguez_rate(const Vec3& rho, const Vec3& omega) noexcept {
  return 0.5 * (Mat3::Identity() + skew(rho) + rho * rho.transpose()) * omega;
}

Vec3 sample_gyro(const GyroModel& model, const Vec3& omega_true, double t, double dt, RandomStream& rng) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  const Vec3 xi = rng.normal3();
  return omega_true + model.bias + model.q_at(t).cwiseProduct(xi) / std::sqrt(dt);
}

SigmaBound sigma_of(const GyroModel& model, double horizon, double step) {
  if (!(step > 0.0) || !(horizon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "bad sigma sampling grid");
  SigmaBound out;
  const auto n = static_cast<std::size_t>(std::ceil(horizon / step));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = std::min(static_cast<double>(k) * step, horizon);
    out.sigma = out.sigma.cwiseMax(model.q_at(t).cwiseAbs2());
  }
  return out;
}

}  // namespace so3filter
