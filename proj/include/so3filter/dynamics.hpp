#pragma once

// Ground truth for the simulator: rigid-body attitude propagation, gyro
// synthesis with Brownian noise, and the covariance bound sigma.

#include "so3filter/random.hpp"
#include "so3filter/so3.hpp"

namespace so3filter {

/// Per-axis sinusoid: value_i(t) = offset_i + amplitude_i * sin(frequency_i * t + phase_i).
struct Sinusoid3 {
  Vec3 offset = Vec3::Zero();
  Vec3 amplitude = Vec3::Zero();
  Vec3 frequency = Vec3::Zero();  // rad/s
  Vec3 phase = Vec3::Zero();      // rad

  Vec3 operator()(double t) const noexcept;
};

/// True body angular velocity Omega(t) [rad/s].
using AngularVelocitySignal = Sinusoid3;

/// [sin(0.7t), 0.7 sin(0.5t + pi), 0.5 sin(0.3t + pi/3)].
AngularVelocitySignal paper_angular_velocity();

struct TrueState {
  Rotation r;
  double t = 0.0;
};

/// Rate gyro: Omega_m = Omega + b + Q dbeta/dt with diagonal Q(t) >= 0.
struct GyroModel {
  Vec3 bias = Vec3::Zero();  // rad/s
  Sinusoid3 q_diag;          // diagonal of Q(t); negative excursions are clipped to 0
  double q_max = 10.0;       // configured bound on every Q_ii

  /// Diagonal of Q at time t, clipped to [0, q_max].
  Vec3 q_at(double t) const noexcept;

  /// Throws Error(InvalidArgument) if the schedule can exceed q_max or fields are non-finite.
  void validate() const;
};

/// sigma_i = max_t Q_ii(t)^2.
struct SigmaBound {
  Vec3 sigma = Vec3::Zero();
};

/// R(t + dt) = reproject(R(t) exp([Omega dt]_x)). Throws Error(InvalidArgument) if dt <= 0.
TrueState propagate_true(const TrueState& state, const Vec3& omega, double dt);

/// rho_dot = (1/2)(I + [rho]_x + rho rho^T) Omega.
Vec3 rodriguez_rate(const Vec3& rho, const Vec3& omega) noexcept;

/// Omega + b + Q(t) xi / sqrt(dt), xi ~ N(0, I): one Euler-Maruyama sample whose integral over the
/// step has covariance Q^2 dt. Throws Error(InvalidArgument) if dt <= 0.
Vec3 sample_gyro(const GyroModel& model, const Vec3& omega_true, double t, double dt, RandomStream& rng);

/// Per-axis max of Q_ii(t)^2 over [0, horizon], sampled every `step` seconds (end point included).
SigmaBound sigma_of(const GyroModel& model, double horizon, double step = 1e-3);

}  // namespace so3filter
