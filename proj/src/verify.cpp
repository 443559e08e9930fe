#include "so3filter/verify.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "so3filter/dynamics.hpp"
#include "so3filter/measurement.hpp"
#include "so3filter/random.hpp"

namespace so3filter {

namespace {

constexpr double kEqualityTol = 1e-10;
constexpr double kIdentityTol = 1e-12;
// Relative slack for inequalities that are attained exactly (e.g. rho along the weakest axis of Mbar).
constexpr double kInequalitySlack = 1e-12;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * std::erfc(-rng_.normal() / std::numbers::sqrt2) / 2.0; }
  Vec3 vec() { return rng_.normal3(); }
  Vec3 unit() {
    Vec3 v = vec();
    while (v.norm() < 1e-3) v = vec();
    return v.normalized();
  }
  Mat3 mat() {
    Mat3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = rng_.normal();
    return m;
  }
  Mat3 sym() {
    const Mat3 a = mat();
    return 0.5 * (a + a.transpose());
  }
  Rotation rotation() { return from_angle_axis({uniform(0.0, std::numbers::pi * 0.999), unit()}); }
  // Rodriguez vector with |rho| <= 10, so 180 degree rotations stay out of reach.
  Vec3 rho() {
    Vec3 r = vec();
    if (r.norm() > 10.0) r *= 10.0 / r.norm();
    return r;
  }
  // Symmetric positive-definite with unit-scaled trace 3.
  Mat3 spd_trace3() {
    const Mat3 a = mat();
    Mat3 m = a * a.transpose() + 0.05 * Mat3::Identity();
    return m * (3.0 / m.trace());
  }
  RandomStream& stream() { return rng_; }

 private:
  RandomStream rng_;
};

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

double min_singular(const Mat3& m) { return Eigen::JacobiSVD<Mat3>(m).singularValues().minCoeff(); }

class Suite {
 public:
  explicit Suite(const VerifyOptions& opts)
      : opts_(opts),
        n_(opts.samples ? opts.samples : (opts.level == VerifyLevel::full ? 100000 : 1000)),
        sampler_(opts.seed) {}

  Vec3 vex_fn(const Mat3& m) const { return opts_.vex_override ? opts_.vex_override(m) : vex(m); }
  Vec3 phi_fn(const Mat3& a) const { return vex_fn(pa(a)); }

  std::size_t n() const { return n_; }
  Sampler& sampler() { return sampler_; }

  bool wanted(const std::string& name) const { return name.rfind(opts_.filter, 0) == 0; }

  /// `body` returns the violation of one sample: positive means beyond tolerance.
  template <class F>
  void equality(const std::string& name, double tol, std::size_t samples, F&& body) {
    if (!wanted(name)) return;
    measure(name, tol, samples, [&] {
      const double v = body();
      return std::pair{v, !(v <= tol)};
    });
  }

  /// `body` returns (lhs, rhs) of lhs <= rhs.
  template <class F>
  void inequality(const std::string& name, std::size_t samples, F&& body) {
    if (!wanted(name)) return;
    measure(name, kInequalitySlack, samples, [&] {
      const auto [lhs, rhs] = body();
      const double excess = lhs - rhs;
      return std::pair{std::max(excess, 0.0), !(excess <= kInequalitySlack * std::max(1.0, std::abs(rhs)))};
    });
  }

  void add(PropertyResult r) { results_.push_back(std::move(r)); }
  std::vector<PropertyResult> take() { return std::move(results_); }

 private:
  template <class F>
  void measure(const std::string& name, double tol, std::size_t samples, F&& one) {
    const auto start = std::chrono::steady_clock::now();
    PropertyResult r{name, samples, 0.0, tol, 0, 0.0};
    for (std::size_t i = 0; i < samples; ++i) {
      const auto [v, bad] = one();
      if (!std::isfinite(v)) {
        r.max_violation = std::numeric_limits<double>::infinity();
        ++r.violations;
        continue;
      }
      r.max_violation = std::max(r.max_violation, v);
      if (bad) ++r.violations;
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results_.push_back(std::move(r));
  }

  VerifyOptions opts_;
  std::size_t n_;
  Sampler sampler_;
  std::vector<PropertyResult> results_;
};

void identities(Suite& s) {
  auto& g = s.sampler();
  const std::size_t n = s.n();
  s.equality("identity.cross_skew", kIdentityTol, n, [&] {
    const Vec3 psi = g.vec(), beta = g.vec();
    return max_abs(skew(psi.cross(beta)) - (beta * psi.transpose() - psi * beta.transpose()));
  });
  s.equality("identity.rotate_skew", kIdentityTol, n, [&] {
    const Rotation r = g.rotation();
    const Vec3 beta = g.vec();
    return max_abs(skew(r * beta) - r.matrix() * skew(beta) * r.matrix().transpose());
  });
  s.equality("identity.skew_square", kIdentityTol, n, [&] {
    const Vec3 beta = g.vec();
    return max_abs(skew(beta) * skew(beta) - (-beta.squaredNorm() * Mat3::Identity() + beta * beta.transpose()));
  });
  s.equality("identity.sym_anticommutator", kIdentityTol, n, [&] {
    const Mat3 b = g.sym();
    const Vec3 beta = g.vec();
    return max_abs(b * skew(beta) + skew(beta) * b - (b.trace() * skew(beta) - skew(b * beta)));
  });
  s.equality("identity.trace_sym_skew", kIdentityTol, n, [&] {
    const Mat3 b = g.sym();
    return std::abs((b * skew(g.vec())).trace());
  });
  s.equality("identity.vex_skew", kIdentityTol, n, [&] {
    const Vec3 v = g.vec();
    return max_abs(s.vex_fn(skew(v)) - v);
  });
  s.equality("identity.phi_rotation", kEqualityTol, n, [&] {
    const Vec3 rho = g.rho();
    return max_abs(s.phi_fn(from_rodriguez(rho).matrix()) - 2.0 * rho / (1.0 + rho.squaredNorm()));
  });
  s.equality("identity.dist_rotation", kEqualityTol, n, [&] {
    const Vec3 rho = g.rho();
    return std::abs(ecl_dist(from_rodriguez(rho)) - rho.squaredNorm() / (1.0 + rho.squaredNorm()));
  });
}

void weighted_distance(Suite& s) {
  auto& g = s.sampler();
  const std::size_t n = s.n();
  auto mbar = [](const Mat3& m) -> Mat3 { return m.trace() * Mat3::Identity() - m; };

  s.equality("lemma.weighted_dist", kEqualityTol, n, [&] {
    const Mat3 m = g.spd_trace3();
    const Vec3 rho = g.rho();
    const double rhs = 0.5 * rho.dot(mbar(m) * rho) / (1.0 + rho.squaredNorm());
    return std::abs(weighted_dist(m, from_rodriguez(rho)) - rhs);
  });
  s.equality("lemma.phi_weighted", kEqualityTol, n, [&] {
    const Mat3 m = g.spd_trace3();
    const Vec3 rho = g.rho();
    const Vec3 rhs = (Mat3::Identity() + skew(rho)).transpose() * mbar(m) * rho / (1.0 + rho.squaredNorm());
    return max_abs(s.phi_fn(m * from_rodriguez(rho).matrix()) - rhs);
  });
  s.inequality("lemma.dist_phi_bound", n, [&] {
    const Mat3 m = g.spd_trace3();
    const Vec3 rho = g.rho();
    const Rotation r = from_rodriguez(rho);
    const Mat3 mr = m * r.matrix();
    const double lam = min_singular(mbar(m));
    const double upsilon = (m.inverse() * mr).trace();
    return std::pair{weighted_dist(m, r), 2.0 / lam * s.phi_fn(mr).squaredNorm() / (1.0 + upsilon)};
  });
  s.inequality("lemma.phi_lower_bound", n, [&] {
    const Mat3 m = g.spd_trace3();
    const Vec3 rho = g.rho();
    const Rotation r = from_rodriguez(rho);
    const double lam = min_singular(mbar(m));
    const double lhs = 2.0 * lam * (1.0 - ecl_dist(r)) * weighted_dist(m, r);
    return std::pair{lhs, s.phi_fn(m * r.matrix()).squaredNorm()};
  });
}

void measurement_oracles(Suite& s) {
  auto& g = s.sampler();
  const std::size_t n = s.n();

  struct Triple {
    MeasurementFrame frame;
    InertialMatrix mats;
    Rotation r_hat;
    Rotation r_tilde;
  };
  // Noise-free frames of 2..4 well-separated references with random weights.
  auto triple = [&]() {
    for (;;) {
      const std::size_t count = 2 + static_cast<std::size_t>(std::abs(g.stream().normal()) * 2.0) % 3;
      ReferenceVectorSet refs;
      for (std::size_t i = 0; i < count; ++i) refs.refs.push_back({g.unit(), Vec3::Zero(), 0.0, g.uniform(0.2, 2.0)});
      if (std::abs(refs.refs[0].inertial.dot(refs.refs[1].inertial)) > 0.95) continue;
      const Rotation r = g.rotation();
      const Rotation r_hat = g.rotation();
      std::vector<Vec3> body;
      for (const auto& ref : refs.refs) body.push_back(r.transpose() * ref.inertial);
      MeasurementFrame frame = augment_cross(normalize_frame(body, refs));
      Mat3 mi = Mat3::Zero();
      for (std::size_t i = 0; i < frame.size(); ++i) mi += frame.weight[i] * frame.inertial[i] * frame.inertial[i].transpose();
      if (min_singular(mi) < 0.05) continue;
      InertialMatrix mats = inertial_matrix(frame);
      return Triple{std::move(frame), mats, r_hat, r * r_hat.transpose()};
    }
  };

  s.equality("oracle.phi", kEqualityTol, n, [&] {
    const Triple t = triple();
    return max_abs(phi_from_vectors(t.frame, t.r_hat) - s.phi_fn(t.mats.m * t.r_tilde.matrix()));
  });
  s.equality("oracle.dist", kEqualityTol, n, [&] {
    const Triple t = triple();
    return std::abs(dist_from_vectors(t.frame, t.r_hat) - weighted_dist(t.mats.m, t.r_tilde));
  });
  s.equality("oracle.upsilon", kEqualityTol, n, [&] {
    const Triple t = triple();
    return std::abs(upsilon_from_vectors(t.frame, t.mats, t.r_hat) - (t.mats.m_inv * t.mats.m * t.r_tilde.matrix()).trace());
  });
  s.equality("oracle.rho_upsilon", 1e-9, n, [&] {
    const Triple t = triple();
    if (t.r_tilde.trace() < -0.9) return 0.0;  // |rho~|^2 > 19; the relation is ill-conditioned there
    const Vec3 rho = to_rodriguez(t.r_tilde);
    return std::abs(1.0 + rho.squaredNorm() - 4.0 / (1.0 + upsilon_from_vectors(t.frame, t.mats, t.r_hat)));
  });
}

void noise_statistics(Suite& s, std::uint64_t seed) {
  const std::size_t n = kNoiseSamples;
  if (s.wanted("noise.gyro_variance")) {
    const auto start = std::chrono::steady_clock::now();
    GyroModel gyro;
    gyro.bias = Vec3(0.2, -0.2, 0.2);
    gyro.q_diag.offset = Vec3(0.2, 0.5, 1.0);
    const double dt = 1e-3;
    RandomStream rng(derive_seed(seed, 1));
    Vec3 sum = Vec3::Zero(), sum_sq = Vec3::Zero();
    const Vec3 omega(0.3, -0.1, 0.7);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 inc = (sample_gyro(gyro, omega, 0.0, dt, rng) - omega - gyro.bias) * dt;
      sum += inc;
      sum_sq += inc.cwiseAbs2();
    }
    const Vec3 mean = sum / static_cast<double>(n);
    const Vec3 var = (sum_sq - static_cast<double>(n) * mean.cwiseAbs2()) / static_cast<double>(n - 1);
    const Vec3 expected = gyro.q_diag.offset.cwiseAbs2() * dt;
    const double worst = (var.cwiseQuotient(expected) - Vec3::Ones()).cwiseAbs().maxCoeff();
    PropertyResult r{"noise.gyro_variance", n, worst, 0.05, worst <= 0.05 ? 0u : 1u, 0.0};
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    s.add(r);
  }
  if (s.wanted("noise.body_bias")) {
    const auto start = std::chrono::steady_clock::now();
    ReferenceVectorSet refs;
    refs.refs = {{Vec3(1.0, -1.0, 1.0) / std::sqrt(3.0), Vec3(-0.1, 0.1, 0.05), 0.2, 1.0},
                 {Vec3(0.0, 0.0, 1.0), Vec3(0.0, 0.0, 0.1), 0.2, 1.0}};
    RandomStream rng(derive_seed(seed, 2));
    const Rotation r = from_angle_axis({0.7, Vec3(1.0, 2.0, 2.0) / 3.0});
    std::vector<Vec3> sum(refs.size(), Vec3::Zero());
    for (std::size_t i = 0; i < n; ++i) {
      const auto body = synthesize_body(r, refs, rng);
      for (std::size_t j = 0; j < refs.size(); ++j) sum[j] += body[j] - r.transpose() * refs.refs[j].inertial;
    }
    // Worst deviation in units of the 3-sigma standard error.
    double worst = 0.0;
    for (std::size_t j = 0; j < refs.size(); ++j) {
      const double bound = 3.0 * refs.refs[j].noise_std / std::sqrt(static_cast<double>(n));
      worst = std::max(worst, max_abs(Vec3(sum[j] / static_cast<double>(n) - refs.refs[j].bias_body)) / bound);
    }
    PropertyResult res{"noise.body_bias", n, worst, 1.0, worst <= 1.0 ? 0u : 1u, 0.0};
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    s.add(res);
  }
}

}  // namespace

std::vector<PropertyResult> run_verification(const VerifyOptions& opts) {
  Suite s(opts);
  identities(s);
  weighted_distance(s);
  measurement_oracles(s);
  noise_statistics(s, opts.seed);
  return s.take();
}

bool all_passed(const std::vector<PropertyResult>& results) noexcept {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.passed(); });
}

}  // namespace so3filter
