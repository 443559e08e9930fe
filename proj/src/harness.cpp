#include "so3filter/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "so3filter/errors.hpp"
#include "so3filter/random.hpp"
#include "so3filter/scenario_io.hpp"

namespace so3filter {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxSteps = std::size_t{1} << 32;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

// The reference geometry is fixed for a run, so M^I comes from the noise-free inertial directions.
MeasurementFrame reference_frame(const ReferenceVectorSet& refs) {
  std::vector<Vec3> raw;
  raw.reserve(refs.size());
  for (const auto& r : refs.refs) raw.push_back(r.inertial);
  return augment_cross(normalize_frame(raw, refs));
}

Vec3 euler_or_nan(const Rotation& r) {
  try {
    return to_euler_zyx(r);
  } catch (const Error&) {
    return Vec3::Constant(kNaN);
  }
}

LogRecord make_record(double t, const TrueState& truth, const FilterState& state, const Scenario& sc,
                      const InertialMatrix& mats, const SigmaBound& sigma) {
  const ErrorTriple err = error_triple(truth, state, sc.gyro, sigma);
  const Innovation innov = innovation_from_error(mats, err.r_tilde);
  LogRecord rec;
  rec.t = t;
  rec.dist_tilde = ecl_dist(err.r_tilde);
  rec.dist_weighted = innov.dist;
  rec.upsilon = innov.upsilon;
  rec.b_hat = state.b_hat;
  rec.sigma_hat = state.sigma_hat;
  rec.b_tilde = err.b_tilde;
  rec.sigma_tilde = err.sigma_tilde;
  rec.euler_true = euler_or_nan(truth.r);
  rec.euler_hat = euler_or_nan(state.r_hat);
  rec.v_potential = err.rho_tilde ? potential_v(err, mats, sc.gains) : kNaN;
  return rec;
}

double rho_sq(double dist) { return dist < 1.0 ? dist / (1.0 - dist) : std::numeric_limits<double>::infinity(); }

double sq_error(const LogRecord& r) {
  return rho_sq(r.dist_tilde) + r.b_tilde.squaredNorm() + r.sigma_tilde.squaredNorm();
}

std::pair<double, double> mean_and_sem(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  if (xs.empty()) return {kNaN, kNaN};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
}

void Scenario::validate() const {
  if (!std::isfinite(duration) || !(duration > 0.0)) config_error("duration must be a positive number");
  if (!std::isfinite(dt) || !(dt > 0.0)) config_error("dt must be a positive number");
  if (dt > duration) config_error("dt must not exceed duration");
  if (duration / dt > static_cast<double>(kMaxSteps)) config_error("duration / dt is too large");
  if (decimation < 1) config_error("decimation must be >= 1");
  for (const Vec3* v : {&omega.offset, &omega.amplitude, &omega.frequency, &omega.phase,
                        &initial_estimate.b_hat, &initial_estimate.sigma_hat}) {
    if (!v->allFinite()) config_error("angular velocity and initial estimates must be finite");
  }
  try {
    gyro.validate();
    refs.validate();
    gains.validate();
    inertial_matrix(reference_frame(refs));
  } catch (const Error& e) {
    config_error(e.detail());
  }
}

Scenario paper_scenario() {
  Scenario sc;
  sc.omega = paper_angular_velocity();
  sc.gyro.bias = 0.2 * Vec3(1.0, -1.0, 1.0);
  sc.gyro.q_diag.offset = Vec3::Constant(0.2);
  sc.refs.refs = {
      ReferenceVector{Vec3(1.0, -1.0, 1.0) / std::sqrt(3.0), 0.1 * Vec3(-1.0, 1.0, 0.5), 0.2, 1.0},
      ReferenceVector{Vec3(0.0, 0.0, 1.0), 0.1 * Vec3(0.0, 0.0, 1.0), 0.2, 1.0},
  };
  sc.r0_true = Rotation::identity();
  sc.initial_estimate.r_hat = from_angle_axis({179.0 * std::numbers::pi / 180.0, Vec3(1.0, 5.0, 3.0).normalized()});
  return sc;
}

TrajectoryLog run(const Scenario& sc) {
  sc.validate();
  const InertialMatrix mats = inertial_matrix(reference_frame(sc.refs));
  const SigmaBound sigma = sigma_of(sc.gyro, sc.duration);
  const std::size_t n = sc.steps();

  RandomStream rng(sc.seed);
  TrueState truth{sc.r0_true, 0.0};
  FilterState state = sc.initial_estimate;

  TrajectoryLog log;
  log.seed = sc.seed;
  log.config_hash = config_hash(sc);
  log.steps = n;
  log.records.reserve(n / sc.decimation + 2);
  log.records.push_back(make_record(0.0, truth, state, sc, mats, sigma));
  log.min_sigma_hat = state.sigma_hat.minCoeff();

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * sc.dt;
    const auto raw = synthesize_body(truth.r, sc.refs, rng);
    const Vec3 omega = sc.omega(t);
    const Vec3 omega_m = sample_gyro(sc.gyro, omega, t, sc.dt, rng);
    const Vec3 body_rate = sc.noise_model == NoiseModel::truth ? Vec3(omega_m - sc.gyro.bias) : omega;
    try {
      const MeasurementFrame frame = augment_cross(normalize_frame(raw, sc.refs));
      state = sc.filter == FilterKind::stochastic ? filter_step(state, omega_m, frame, mats, sc.gains, sc.dt)
                                                  : baseline_step(state, omega_m, frame, mats, sc.gains, sc.dt);
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), k);
    }
    truth = propagate_true(truth, body_rate, sc.dt);
    truth.t = static_cast<double>(k + 1) * sc.dt;
    log.min_sigma_hat = std::min(log.min_sigma_hat, state.sigma_hat.minCoeff());
    if ((k + 1) % sc.decimation == 0 || k + 1 == n) {
      log.records.push_back(make_record(truth.t, truth, state, sc, mats, sigma));
    }
  }
  return log;
}

WindowStats window_stats(const TrajectoryLog& log, double window_start) {
  WindowStats ws;
  ws.min_dist = std::numeric_limits<double>::infinity();
  double sum_d = 0.0;
  double sum_e = 0.0;
  for (const auto& r : log.records) {
    ws.min_dist = std::min(ws.min_dist, r.dist_tilde);
    if (r.t >= window_start - 1e-12) {
      sum_d += r.dist_tilde;
      sum_e += sq_error(r);
      ++ws.samples;
    }
  }
  if (ws.samples > 0) {
    ws.mean_dist = sum_d / static_cast<double>(ws.samples);
    ws.mean_sq_error = sum_e / static_cast<double>(ws.samples);
  } else {
    ws.mean_dist = ws.mean_sq_error = kNaN;
  }
  return ws;
}

std::uint64_t trial_seed(const Scenario& sc, std::size_t trial) noexcept { return derive_seed(sc.seed, trial); }

MonteCarloSummary monte_carlo(const Scenario& sc, std::size_t n, const MonteCarloOptions& opts) {
  if (n < 1) config_error("number of trials must be >= 1");
  if (!(opts.window_fraction > 0.0 && opts.window_fraction <= 1.0)) config_error("window_fraction must lie in (0, 1]");
  sc.validate();

  std::vector<std::optional<TrajectoryLog>> results(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      Scenario trial = sc;
      trial.seed = trial_seed(sc, i);
      try {
        results[i] = run(trial);
        if (opts.on_trial) opts.on_trial(i, *results[i]);
      } catch (const std::exception& e) {
        results[i].reset();
        errors[i] = e.what();
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  MonteCarloSummary s;
  s.window_start = sc.duration * (1.0 - opts.window_fraction);
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) s.failures.push_back({i, trial_seed(sc, i), errors[i]});
  }

  std::vector<double> trial_dist;
  std::vector<double> trial_err;
  for (std::size_t i = 0; i < n; ++i) {
    if (!results[i]) continue;
    const TrajectoryLog& log = *results[i];
    if (s.n_trials == 0) {
      const std::size_t m = log.records.size();
      s.t.resize(m);
      for (std::size_t j = 0; j < m; ++j) s.t[j] = log.records[j].t;
      for (auto* v : {&s.mean_dist, &s.mean_sq_dist, &s.mean_b_err, &s.mean_sq_b_err, &s.mean_s_err, &s.mean_sq_s_err}) {
        v->assign(m, 0.0);
      }
    }
    for (std::size_t j = 0; j < log.records.size(); ++j) {
      const auto& r = log.records[j];
      const double b = r.b_tilde.norm();
      const double sg = r.sigma_tilde.norm();
      s.mean_dist[j] += r.dist_tilde;
      s.mean_sq_dist[j] += r.dist_tilde * r.dist_tilde;
      s.mean_b_err[j] += b;
      s.mean_sq_b_err[j] += b * b;
      s.mean_s_err[j] += sg;
      s.mean_sq_s_err[j] += sg * sg;
    }
    ++s.n_trials;
    s.trial_seeds.push_back(log.seed);
    s.trial_window.push_back(window_stats(log, s.window_start));
    trial_dist.push_back(s.trial_window.back().mean_dist);
    trial_err.push_back(s.trial_window.back().mean_sq_error);
    if (opts.keep_logs) s.logs.push_back(std::move(*results[i]));
  }
  if (s.n_trials > 0) {
    const double inv = 1.0 / static_cast<double>(s.n_trials);
    for (auto* v : {&s.mean_dist, &s.mean_sq_dist, &s.mean_b_err, &s.mean_sq_b_err, &s.mean_s_err, &s.mean_sq_s_err}) {
      for (double& x : *v) x *= inv;
    }
  }
  std::tie(s.steady_mean_dist, s.steady_sem_dist) = mean_and_sem(trial_dist);
  std::tie(s.steady_mean_sq_error, s.steady_sem_sq_error) = mean_and_sem(trial_err);
  return s;
}

std::string_view to_string(FilterKind kind) noexcept {
  return kind == FilterKind::stochastic ? "stochastic" : "baseline";
}

std::string_view to_string(NoiseModel model) noexcept {
  return model == NoiseModel::measurement ? "measurement" : "truth";
}

}  // namespace so3filter
