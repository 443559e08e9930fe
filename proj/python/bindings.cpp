#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "so3filter/csv.hpp"
#include "so3filter/errors.hpp"
#include "so3filter/filter.hpp"
#include "so3filter/harness.hpp"
#include "so3filter/measurement.hpp"
#include "so3filter/scenario_io.hpp"
#include "so3filter/so3.hpp"
#include "so3filter/verify.hpp"

namespace py = pybind11;
using namespace so3filter;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

Rotation as_rotation(const Mat3& m) { return Rotation(m); }

FilterKind parse_filter(const std::string& s) {
  if (s == "stochastic") return FilterKind::stochastic;
  if (s == "baseline") return FilterKind::baseline;
  throw Error(ErrorCode::ConfigError, "filter must be 'stochastic' or 'baseline', got '" + s + "'");
}

NoiseModel parse_noise(const std::string& s) {
  if (s == "measurement") return NoiseModel::measurement;
  if (s == "truth") return NoiseModel::truth;
  throw Error(ErrorCode::ConfigError, "noise_model must be 'measurement' or 'truth', got '" + s + "'");
}

py::dict log_to_dict(const TrajectoryLog& log) {
  const std::size_t n = log.records.size();
  const auto& cols = trajectory_columns();
  std::vector<py::array_t<double>> arrays;
  std::vector<double*> ptr;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    arrays.emplace_back(static_cast<py::ssize_t>(n));
    ptr.push_back(arrays.back().mutable_data());
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = log.records[i];
    const double row[] = {r.t,
                          r.dist_tilde,
                          r.dist_weighted,
                          r.upsilon,
                          r.b_hat[0],
                          r.b_hat[1],
                          r.b_hat[2],
                          r.sigma_hat[0],
                          r.sigma_hat[1],
                          r.sigma_hat[2],
                          r.b_tilde[0],
                          r.b_tilde[1],
                          r.b_tilde[2],
                          r.sigma_tilde[0],
                          r.sigma_tilde[1],
                          r.sigma_tilde[2],
                          r.euler_true[0] * kDeg,
                          r.euler_true[1] * kDeg,
                          r.euler_true[2] * kDeg,
                          r.euler_hat[0] * kDeg,
                          r.euler_hat[1] * kDeg,
                          r.euler_hat[2] * kDeg,
                          r.v_potential};
    for (std::size_t c = 0; c < cols.size(); ++c) ptr[c][i] = row[c];
  }
  py::dict out;
  for (std::size_t c = 0; c < cols.size(); ++c) out[py::str(cols[c])] = arrays[c];
  return out;
}

}  // namespace

PYBIND11_MODULE(_so3filter, m) {
  m.doc() = "Stochastic attitude filter on SO(3)";

  py::register_exception<Error>(m, "So3FilterError", PyExc_RuntimeError);

  m.attr("TRAJECTORY_COLUMNS") = py::cast(trajectory_columns());

  m.def("skew", &skew, py::arg("v"));
  m.def("vex", [](const Mat3& a) { return vex(a); }, py::arg("a"));
  m.def("pa", &pa, py::arg("a"));
  m.def("phi", &phi, py::arg("a"));
  m.def("ecl_dist", [](const Mat3& r) { return ecl_dist(as_rotation(r)); }, py::arg("r"));
  m.def("weighted_dist", [](const Mat3& mi, const Mat3& r) { return weighted_dist(mi, as_rotation(r)); },
        py::arg("m"), py::arg("r"));
  m.def("from_angle_axis", [](double angle, const Vec3& axis) { return from_angle_axis({angle, axis}).matrix(); },
        py::arg("angle"), py::arg("axis"));
  m.def("from_rodriguez", [](const Vec3& rho) { return from_rodriguez(rho).matrix(); }, py::arg("rho"));
  m.def("to_rodriguez", [](const Mat3& r) { return to_rodriguez(as_rotation(r)); }, py::arg("r"));
  m.def("exp_map", [](const Vec3& w) { return exp_map(w).matrix(); }, py::arg("w"));
  m.def("reproject", [](const Mat3& a) { return reproject(a).matrix(); }, py::arg("m"));
  m.def("to_euler_zyx", [](const Mat3& r) { return to_euler_zyx(as_rotation(r)); }, py::arg("r"),
        "(yaw, pitch, roll) in radians");
  m.def("from_euler_zyx", [](const Vec3& ypr) { return from_euler_zyx(ypr).matrix(); }, py::arg("ypr"));

  py::class_<FilterGains>(m, "FilterGains")
      .def(py::init<>())
      .def_readwrite("k_w", &FilterGains::k_w)
      .def_readwrite("k_b", &FilterGains::k_b)
      .def_readwrite("k_sigma", &FilterGains::k_sigma)
      .def_readwrite("gamma", &FilterGains::gamma)
      .def_readwrite("epsilon", &FilterGains::epsilon)
      .def_readwrite("upsilon_floor", &FilterGains::upsilon_floor)
      .def("validate", &FilterGains::validate);

  m.def(
      "filter_step",
      [](const Mat3& r_hat, const Vec3& b_hat, const Vec3& sigma_hat, const Vec3& omega_m,
         const std::vector<Vec3>& inertial, const std::vector<Vec3>& body, const FilterGains& gains, double dt,
         std::optional<std::vector<double>> weights, const std::string& filter) {
        if (inertial.size() != body.size())
          throw Error(ErrorCode::InvalidArgument, "inertial and body must have the same length");
        ReferenceVectorSet refs;
        for (std::size_t i = 0; i < inertial.size(); ++i)
          refs.refs.push_back({inertial[i], Vec3::Zero(), 0.0, weights ? weights->at(i) : 1.0});
        refs.validate();
        const MeasurementFrame ref = augment_cross(normalize_frame(inertial, refs));
        const InertialMatrix mats = inertial_matrix(ref);
        const MeasurementFrame frame = augment_cross(normalize_frame(body, refs));
        const FilterState state{as_rotation(r_hat), b_hat, sigma_hat};
        const FilterState next = parse_filter(filter) == FilterKind::stochastic
                                     ? filter_step(state, omega_m, frame, mats, gains, dt)
                                     : baseline_step(state, omega_m, frame, mats, gains, dt);
        return py::make_tuple(next.r_hat.matrix(), next.b_hat, next.sigma_hat);
      },
      py::arg("r_hat"), py::arg("b_hat"), py::arg("sigma_hat"), py::arg("omega_m"), py::arg("inertial"),
      py::arg("body"), py::arg("gains") = FilterGains{}, py::arg("dt") = 1e-3, py::arg("weights") = py::none(),
      py::arg("filter") = "stochastic",
      "One discrete filter step from raw inertial/body vector pairs. Returns (R_hat, b_hat, sigma_hat).");

  py::class_<Scenario>(m, "Scenario")
      .def_static("from_text", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"),
                  "Applies key = value text on top of the built-in scenario.")
      .def_static("load", [](const std::string& path) { return load_scenario(path); }, py::arg("path"))
      .def("to_text", &format_scenario)
      .def("config_hash", &config_hash)
      .def("validate", &Scenario::validate)
      .def("steps", &Scenario::steps)
      .def_readwrite("duration", &Scenario::duration)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("decimation", &Scenario::decimation)
      .def_readwrite("gains", &Scenario::gains)
      .def_property(
          "filter", [](const Scenario& s) { return std::string(to_string(s.filter)); },
          [](Scenario& s, const std::string& v) { s.filter = parse_filter(v); })
      .def_property(
          "noise_model", [](const Scenario& s) { return std::string(to_string(s.noise_model)); },
          [](Scenario& s, const std::string& v) { s.noise_model = parse_noise(v); })
      .def_property(
          "r_hat0", [](const Scenario& s) { return Mat3(s.initial_estimate.r_hat.matrix()); },
          [](Scenario& s, const Mat3& r) { s.initial_estimate.r_hat = as_rotation(r); })
      .def_property(
          "r0_true", [](const Scenario& s) { return Mat3(s.r0_true.matrix()); },
          [](Scenario& s, const Mat3& r) { s.r0_true = as_rotation(r); })
      .def("__repr__", [](const Scenario& s) {
        return "<Scenario duration=" + format_double(s.duration) + " dt=" + format_double(s.dt) +
               " seed=" + std::to_string(s.seed) + " filter=" + std::string(to_string(s.filter)) + ">";
      });

  m.def("paper_scenario", &paper_scenario);

  m.def(
      "run",
      [](const Scenario& sc) {
        TrajectoryLog log;
        {
          py::gil_scoped_release release;
          log = run(sc);
        }
        py::dict out = log_to_dict(log);
        out["seed"] = log.seed;
        out["config_hash"] = log.config_hash;
        out["min_sigma_hat"] = log.min_sigma_hat;
        return out;
      },
      py::arg("scenario"), "Runs one trial; returns a dict of numpy columns plus seed and config_hash.");

  m.def(
      "monte_carlo",
      [](const Scenario& sc, std::size_t n, unsigned threads, double window_fraction) {
        MonteCarloOptions opts;
        opts.threads = threads;
        opts.window_fraction = window_fraction;
        MonteCarloSummary s;
        {
          py::gil_scoped_release release;
          s = monte_carlo(sc, n, opts);
        }
        py::list failures;
        for (const auto& f : s.failures)
          failures.append(py::dict(py::arg("trial") = f.trial, py::arg("seed") = f.seed,
                                   py::arg("message") = f.message));
        std::vector<double> trial_mean, trial_min;
        for (const auto& w : s.trial_window) {
          trial_mean.push_back(w.mean_dist);
          trial_min.push_back(w.min_dist);
        }
        return py::dict(py::arg("n_trials") = s.n_trials, py::arg("failures") = failures,
                        py::arg("window_start") = s.window_start, py::arg("t") = py::array(py::cast(s.t)),
                        py::arg("mean_dist") = py::array(py::cast(s.mean_dist)),
                        py::arg("trial_seeds") = s.trial_seeds,
                        py::arg("trial_steady_mean_dist") = py::array(py::cast(trial_mean)),
                        py::arg("trial_min_dist") = py::array(py::cast(trial_min)),
                        py::arg("steady_mean_dist") = s.steady_mean_dist,
                        py::arg("steady_sem_dist") = s.steady_sem_dist,
                        py::arg("steady_mean_sq_error") = s.steady_mean_sq_error,
                        py::arg("steady_sem_sq_error") = s.steady_sem_sq_error);
      },
      py::arg("scenario"), py::arg("n"), py::arg("threads") = 0u, py::arg("window_fraction") = 0.2);

  m.def(
      "verify",
      [](const std::string& level, std::uint64_t seed, const std::string& only) {
        VerifyOptions opts;
        if (level == "fast")
          opts.level = VerifyLevel::fast;
        else if (level == "full")
          opts.level = VerifyLevel::full;
        else
          throw Error(ErrorCode::ConfigError, "level must be 'fast' or 'full'");
        opts.seed = seed;
        opts.filter = only;
        std::vector<PropertyResult> results;
        {
          py::gil_scoped_release release;
          results = run_verification(opts);
        }
        py::list out;
        for (const auto& r : results)
          out.append(py::dict(py::arg("name") = r.name, py::arg("samples") = r.samples,
                              py::arg("max_violation") = r.max_violation, py::arg("tolerance") = r.tolerance,
                              py::arg("violations") = r.violations, py::arg("passed") = r.passed()));
        return out;
      },
      py::arg("level") = "fast", py::arg("seed") = VerifyOptions{}.seed, py::arg("only") = "");
}
