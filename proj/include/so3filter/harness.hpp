#pragma once

// Scenario assembly, time-stepped co-simulation of truth, sensors and filter,
// and Monte Carlo aggregation.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "so3filter/dynamics.hpp"
#include "so3filter/filter.hpp"
#include "so3filter/measurement.hpp"

namespace so3filter {

enum class FilterKind { stochastic, baseline };

/// Where the gyro's Brownian term lives.
///  measurement: the true body follows Omega(t); only the gyro reading is noisy (default).
///  truth:       the same increment drives the true body rate; the gyro reads that rate plus bias.
enum class NoiseModel { measurement, truth };

struct Scenario {
  double duration = 10.0;  // s
  double dt = 1e-3;        // s
  AngularVelocitySignal omega;
  GyroModel gyro;
  ReferenceVectorSet refs;
  Rotation r0_true;
  FilterState initial_estimate;
  FilterGains gains;
  std::uint64_t seed = 1;
  FilterKind filter = FilterKind::stochastic;
  NoiseModel noise_model = NoiseModel::measurement;
  std::size_t decimation = 10;  // log every n-th step; 1 = full rate

  /// Number of integration steps, ceil(duration / dt).
  std::size_t steps() const;

  /// Throws Error(ConfigError) describing the first violated invariant.
  void validate() const;
};

/// The published simulation: R(0) = I, R^(0) from 179 deg about [1,5,3], two noisy references,
/// biased noisy gyro, gains (k_w, k_b, k_sigma, gamma, eps) = (5, 0.5, 0.5, 1, 0.5).
Scenario paper_scenario();

struct LogRecord {
  double t = 0.0;
  double dist_tilde = 0.0;     // ||R~||_I
  double dist_weighted = 0.0;  // ||M^I R~||_I
  double upsilon = 0.0;        // Tr{(M^I)^{-1} M^I R~}
  Vec3 b_hat = Vec3::Zero();
  Vec3 sigma_hat = Vec3::Zero();
  Vec3 b_tilde = Vec3::Zero();
  Vec3 sigma_tilde = Vec3::Zero();
  Vec3 euler_true = Vec3::Zero();  // (yaw, pitch, roll) rad; NaN at gimbal lock
  Vec3 euler_hat = Vec3::Zero();
  double v_potential = 0.0;  // NaN when R~ has no Rodriguez vector
};

struct TrajectoryLog {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t steps = 0;
  std::vector<LogRecord> records;  // steps 0, d, 2d, ... and always the final step
  double min_sigma_hat = 0.0;      // smallest sigma^ component seen at any step
};

/// Runs one trial. Deterministic in (scenario, seed).
/// Throws Error(NearUnstableSet, step) when the filter laws reach the unstable set.
TrajectoryLog run(const Scenario& sc);

/// Time-window statistics of one logged run.
struct WindowStats {
  double mean_dist = 0.0;      // mean ||R~||_I
  double mean_sq_error = 0.0;  // mean of |rho~|^2 + |b~|^2 + |sigma~|^2
  double min_dist = 0.0;       // smallest ||R~||_I over the whole log
  std::size_t samples = 0;
};

/// Statistics over records with t >= window_start.
WindowStats window_stats(const TrajectoryLog& log, double window_start);

struct TrialFailure {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct MonteCarloOptions {
  unsigned threads = 0;               // 0 = hardware concurrency
  double window_fraction = 0.2;       // steady-state window = last 20 % of the horizon
  bool keep_logs = false;
  /// Called once per successful trial from the worker thread that ran it (concurrently across trials).
  std::function<void(std::size_t trial, const TrajectoryLog& log)> on_trial;
};

struct MonteCarloSummary {
  std::size_t n_trials = 0;  // successful trials
  std::vector<TrialFailure> failures;
  double window_start = 0.0;

  std::vector<double> t;
  std::vector<double> mean_dist, mean_sq_dist;
  std::vector<double> mean_b_err, mean_sq_b_err;  // |b~|
  std::vector<double> mean_s_err, mean_sq_s_err;  // |sigma~|

  std::vector<std::uint64_t> trial_seeds;  // successful trials, in trial order
  std::vector<WindowStats> trial_window;

  double steady_mean_dist = 0.0;
  double steady_sem_dist = 0.0;
  double steady_mean_sq_error = 0.0;
  double steady_sem_sq_error = 0.0;

  std::vector<TrajectoryLog> logs;  // only with keep_logs
};

/// Seed of trial i: derive_seed(sc.seed, i).
std::uint64_t trial_seed(const Scenario& sc, std::size_t trial) noexcept;

/// Runs n independent trials (possibly in parallel); failed trials are reported, not fatal.
MonteCarloSummary monte_carlo(const Scenario& sc, std::size_t n, const MonteCarloOptions& opts = {});

std::string_view to_string(FilterKind kind) noexcept;
std::string_view to_string(NoiseModel model) noexcept;

}  // namespace so3filter
