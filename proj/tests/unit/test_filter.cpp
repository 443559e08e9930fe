#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "convert.hpp"
#include "oracle.hpp"
#include "so3filter/errors.hpp"
#include "so3filter/filter.hpp"

using namespace so3filter;
using testing::max_diff;
using testing::to_eigen;

namespace {

// Built-in reference pair plus its cross product, unit weights.
InertialMatrix paper_mats() {
  MeasurementFrame f;
  const Vec3 a = Vec3(1, -1, 1).normalized(), b = Vec3::UnitZ();
  f.inertial = {a, b, a.cross(b).normalized()};
  f.body = f.inertial;
  f.weight = {1, 1, 1};
  return inertial_matrix(f);
}

MeasurementFrame frame_for(const Rotation& r) {
  MeasurementFrame f;
  const Vec3 a = Vec3(1, -1, 1).normalized(), b = Vec3::UnitZ();
  f.inertial = {a, b, a.cross(b).normalized()};
  for (const auto& v : f.inertial) f.body.push_back(r.matrix().transpose() * v);
  f.weight = {1, 1, 1};
  return f;
}

}  // namespace

TEST_CASE("FilterGains::validate") {
  CHECK_NOTHROW(FilterGains{}.validate());
  FilterGains g;
  g.k_w = 0.5;
  CHECK_THROWS_AS(g.validate(), Error);
  g = FilterGains{};
  g.gamma = 0.0;
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("built-in inertial matrix") {
  const auto m = paper_mats();
  CHECK(m.lambda_min == doctest::Approx(1.4226497308103743).epsilon(1e-12));
}

TEST_CASE("correction_w") {
  const auto mats = paper_mats();
  const FilterGains gains;
  FilterState st;
  CHECK(correction_w(Innovation{}, st, mats, gains) == Vec3::Zero());

  // First-term gain at Upsilon = 3.
  const double lam = mats.lambda_min;
  const Innovation unit{Vec3::UnitX(), 0.0, 3.0};
  const double expected = (5.0 / (0.5 * lam)) * (16.0 * lam * lam + 1.0) / 4.0;
  CHECK(correction_w(unit, st, mats, gains)[0] == doctest::Approx(expected).epsilon(1e-14));

  // Term-by-term evaluation for random states and pose errors.
  oracle::Gen g(1);
  for (int i = 0; i < 1000; ++i) {
    st.r_hat = testing::rotation(g.rotation());
    st.sigma_hat = to_eigen(g.vec()).cwiseAbs();
    const Rotation r_tilde = testing::rotation(g.rotation());
    if (r_tilde.trace() < -0.9) continue;
    const Innovation in = innovation_from_error(mats, r_tilde);
    const double u = 1.0 + in.upsilon;
    const Vec3 body = st.r_hat.matrix().transpose() * in.phi;
    Vec3 second = Vec3::Zero();
    for (int k = 0; k < 3; ++k) second[k] = body[k] * st.sigma_hat[k];
    const Vec3 w = gains.k_w / (gains.epsilon * lam) * (u * u * lam * lam + 1.0) / u * in.phi +
                   st.r_hat.matrix() * second / (lam * u);
    CHECK(max_diff(correction_w(in, st, mats, gains), w) < 1e-12 * std::max(1.0, w.norm()));
  }

  try {
    correction_w(Innovation{Vec3::UnitX(), 1.0, -1.0 + 1e-7}, st, mats, gains);
    FAIL("expected NearUnstableSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearUnstableSet);
  }
}

TEST_CASE("bias_update and sigma_update") {
  const auto mats = paper_mats();
  const FilterGains gains;
  FilterState st;
  CHECK(bias_update(Innovation{}, st, mats, gains) == Vec3::Zero());
  CHECK(sigma_update(Innovation{}, st, mats, gains) == Vec3::Zero());

  st.b_hat = Vec3(0.3, -0.1, 0.2);
  st.sigma_hat = Vec3(0.05, 0.02, -0.01);
  CHECK(max_diff(bias_update(Innovation{}, st, mats, gains), -0.5 * st.b_hat) < 1e-16);
  CHECK(max_diff(sigma_update(Innovation{}, st, mats, gains), -0.5 * st.sigma_hat) < 1e-16);

  oracle::Gen g(2);
  for (int i = 0; i < 10000; ++i) {
    FilterState s;
    s.r_hat = testing::rotation(g.rotation());
    const Rotation r_tilde = testing::rotation(g.rotation());
    if (r_tilde.trace() < -0.99) continue;
    const Innovation in = innovation_from_error(mats, r_tilde);
    const Vec3 body = s.r_hat.matrix().transpose() * in.phi;
    // Driving term of the sigma law, with sigma^ = 0 so only it remains.
    const Vec3 drive = sigma_update(in, s, mats, gains);
    for (int k = 0; k < 3; ++k) {
      const double expected = gains.gamma * in.dist / (mats.lambda_min * (1.0 + in.upsilon)) * body[k] * body[k];
      REQUIRE(drive[k] >= 0.0);
      REQUIRE(drive[k] == doctest::Approx(expected).epsilon(1e-12));
    }
    const Vec3 b = bias_update(in, s, mats, gains);
    REQUIRE(max_diff(b, -gains.gamma * in.dist * body) < 1e-14);
  }
}

TEST_CASE("filter_step fixed point and integration") {
  const auto mats = paper_mats();
  const FilterGains gains;
  FilterState st;
  st.r_hat = from_angle_axis({0.4, Vec3(0, 0.6, 0.8)});
  const auto next = filter_step(st, Vec3::Zero(), frame_for(st.r_hat), mats, gains, 1e-3);
  CHECK(max_diff(next.r_hat.matrix(), st.r_hat.matrix()) < 1e-14);
  CHECK(next.b_hat.norm() < 1e-15);
  CHECK(next.sigma_hat.norm() < 1e-15);
  CHECK_THROWS_AS(filter_step(st, Vec3::Zero(), frame_for(st.r_hat), mats, gains, 0.0), Error);

  // One step against the explicit update formula.
  FilterState s2;
  s2.r_hat = from_angle_axis({0.7, Vec3(1, 2, 2) / 3.0});
  s2.b_hat = Vec3(0.01, 0.02, -0.03);
  s2.sigma_hat = Vec3(0.01, 0.0, 0.02);
  const Rotation truth = from_angle_axis({0.2, Vec3::UnitX()});
  const Vec3 omega_m(0.3, -0.2, 0.1);
  const double dt = 1e-3;
  const Innovation in = innovation_from_vectors(frame_for(truth), mats, s2.r_hat);
  const Vec3 w = correction_w(in, s2, mats, gains);
  const Mat3 expected = exp_map(w * dt).matrix() * s2.r_hat.matrix() * exp_map((omega_m - s2.b_hat) * dt).matrix();
  const auto n2 = filter_step(s2, omega_m, frame_for(truth), mats, gains, dt);
  CHECK(max_diff(n2.r_hat.matrix(), expected) < 1e-13);
  CHECK(max_diff(n2.b_hat, s2.b_hat + bias_update(in, s2, mats, gains) * dt) < 1e-16);
  CHECK(max_diff(n2.sigma_hat, s2.sigma_hat + sigma_update(in, s2, mats, gains) * dt) < 1e-16);
}

TEST_CASE("upsilon floor") {
  const auto mats = paper_mats();
  FilterGains gains;
  FilterState st;
  const Innovation near_pi{Vec3(0.01, 0, 0), 0.9, -1.3};
  CHECK_NOTHROW(filter_step(st, Vec3::Zero(), near_pi, mats, gains, 1e-3));
  gains.upsilon_floor = 0.0;
  try {
    filter_step(st, Vec3::Zero(), near_pi, mats, gains, 1e-3);
    FAIL("expected NearUnstableSet");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearUnstableSet);
  }
}

TEST_CASE("leakage decay with Phi held at zero") {
  const auto mats = paper_mats();
  const FilterGains gains;
  FilterState st;
  st.b_hat = Vec3(0.2, -0.1, 0.05);
  st.sigma_hat = Vec3(0.04, 0.03, 0.02);
  const FilterState start = st;
  const double dt = 1e-3;
  const double horizon = 5.0 / (gains.gamma * gains.k_b);
  const auto steps = static_cast<int>(std::round(horizon / dt));
  for (int k = 0; k < steps; ++k) st = filter_step(st, Vec3::Zero(), Innovation{}, mats, gains, dt);
  const double decay_b = std::exp(-gains.gamma * gains.k_b * horizon);
  const double decay_s = std::exp(-gains.gamma * gains.k_sigma * horizon);
  for (int a = 0; a < 3; ++a) {
    CHECK(st.b_hat[a] == doctest::Approx(start.b_hat[a] * decay_b).epsilon(0.01));
    CHECK(st.sigma_hat[a] == doctest::Approx(start.sigma_hat[a] * decay_s).epsilon(0.01));
  }
}

TEST_CASE("estimate stays on SO(3) over 1e5 steps") {
  const auto mats = paper_mats();
  const FilterGains gains;
  FilterState st;
  st.r_hat = from_angle_axis({2.0, Vec3(1, 5, 3).normalized()});
  Rotation truth;
  const double dt = 1e-3;
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const Vec3 omega(std::sin(0.7 * k * dt), 0.3, -0.2);
    st = filter_step(st, omega, frame_for(truth), mats, gains, dt);
    truth = reproject((truth * exp_map(omega * dt)).matrix());
    worst = std::max(worst, st.r_hat.orthonormality_error());
  }
  CHECK(worst < 1e-9);
  CHECK(ecl_dist(truth * st.r_hat.transpose()) < 1e-6);
}

TEST_CASE("frame-driven filter matches a ghost fed matrix-space innovations") {
  const auto mats = paper_mats();
  const FilterGains gains;
  FilterState a, b;
  a.r_hat = b.r_hat = from_angle_axis({2.5, Vec3(1, 5, 3).normalized()});
  Rotation truth;
  const double dt = 1e-3;
  double worst = 0.0;
  for (int k = 0; k < 5000; ++k) {
    const double t = k * dt;
    const Vec3 omega(std::sin(0.7 * t), 0.7 * std::sin(0.5 * t + std::numbers::pi), 0.5 * std::sin(0.3 * t + 1.0));
    a = filter_step(a, omega, frame_for(truth), mats, gains, dt);
    b = filter_step(b, omega, innovation_from_error(mats, truth * b.r_hat.transpose()), mats, gains, dt);
    truth = reproject((truth * exp_map(omega * dt)).matrix());
    worst = std::max({worst, max_diff(a.r_hat.matrix(), b.r_hat.matrix()), max_diff(a.b_hat, b.b_hat),
                      max_diff(a.sigma_hat, b.sigma_hat)});
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("baseline_step") {
  const auto mats = paper_mats();
  const FilterGains gains;
  FilterState st;
  st.r_hat = from_angle_axis({0.3, Vec3::UnitY()});
  const auto same = baseline_step(st, Vec3::Zero(), frame_for(st.r_hat), mats, gains, 1e-3);
  CHECK(max_diff(same.r_hat.matrix(), st.r_hat.matrix()) < 1e-14);

  // Correction is k_w Phi; sigma^ is left alone.
  st.sigma_hat = Vec3(0.1, 0.2, 0.3);
  const Rotation truth = from_angle_axis({0.5, Vec3::UnitZ()});
  const Innovation in = innovation_from_vectors(frame_for(truth), mats, st.r_hat);
  const auto next = baseline_step(st, Vec3::Zero(), in, mats, gains, 1e-3);
  CHECK(max_diff(next.r_hat.matrix(), (exp_map(gains.k_w * in.phi * 1e-3) * st.r_hat).matrix()) < 1e-14);
  CHECK(next.sigma_hat == st.sigma_hat);

  FilterState s;
  s.r_hat = from_angle_axis({1.0, Vec3(1, 1, 1).normalized()});
  Rotation r;
  for (int k = 0; k < 10000; ++k) s = baseline_step(s, Vec3::Zero(), frame_for(r), mats, gains, 1e-3);
  CHECK(ecl_dist(r * s.r_hat.transpose()) < 1e-3);
}

TEST_CASE("error_triple") {
  GyroModel gyro;
  gyro.bias = Vec3(0.2, -0.2, 0.2);
  const SigmaBound sigma{Vec3::Constant(0.04)};
  TrueState truth{from_angle_axis({0.9, Vec3::UnitX()}), 0.0};
  FilterState st;
  st.r_hat = truth.r;
  st.b_hat = gyro.bias;
  st.sigma_hat = sigma.sigma;
  const auto e = error_triple(truth, st, gyro, sigma);
  CHECK(max_diff(e.r_tilde.matrix(), Mat3::Identity()) < 1e-15);
  REQUIRE(e.rho_tilde);
  CHECK(e.rho_tilde->norm() < 1e-15);
  CHECK(e.b_tilde == Vec3::Zero());
  CHECK(e.sigma_tilde == Vec3::Zero());

  const Vec3 delta(1e-3, -2e-3, 0.5e-3);
  st.r_hat = truth.r * exp_map(delta).transpose();
  const auto small = error_triple(truth, st, gyro, sigma);
  CHECK(ecl_dist(small.r_tilde) == doctest::Approx(delta.squaredNorm() / 4.0).epsilon(1e-5));

  st.r_hat = from_angle_axis({std::numbers::pi, Vec3::UnitY()}).transpose() * truth.r;
  CHECK_FALSE(error_triple(truth, st, gyro, sigma).rho_tilde.has_value());
}

TEST_CASE("potential_v") {
  const auto mats = paper_mats();
  const FilterGains gains;
  ErrorTriple e;
  e.rho_tilde = Vec3::Zero();
  CHECK(potential_v(e, mats, gains) == 0.0);
  e.b_tilde = Vec3(0.1, 0.2, -0.2);
  CHECK(potential_v(e, mats, gains) == doctest::Approx(0.09 / 2.0));

  oracle::Gen g(3);
  for (int i = 0; i < 1000; ++i) {
    ErrorTriple a;
    const Vec3 rho = to_eigen(g.vec());
    a.r_tilde = from_rodriguez(rho);
    a.rho_tilde = rho;
    const double wd = weighted_dist(mats.m, a.r_tilde);
    CHECK(potential_v(a, mats, gains) == doctest::Approx(wd * wd).epsilon(1e-10));
    CHECK(potential_v(a, mats, gains) >= 0.0);
  }
  ErrorTriple none;
  none.rho_tilde.reset();
  CHECK_THROWS_AS(potential_v(none, mats, gains), Error);
}
