#include "so3filter/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "so3filter/csv.hpp"
#include "so3filter/errors.hpp"
#include "so3filter/scenario_io.hpp"

namespace so3filter::cli {

namespace {

std::string trial_file(const std::string& prefix, std::size_t trial) {
  std::ostringstream os;
  os << prefix << "trial_" << std::setw(4) << std::setfill('0') << trial << ".csv";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
}

std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir = cfg.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutDirEnv);
    dir = (env && *env) ? std::filesystem::path(env) : std::filesystem::path("so3filter_out");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::ConfigError, "cannot create output directory " + dir.string());
  }
  return dir;
}

struct TrialRow {
  std::uint64_t seed = 0;
  double initial_dist = 0.0;
  double final_dist = 0.0;
  WindowStats window;
  double min_sigma_hat = 0.0;
};

// Runs the batch, writing each trial's CSV from its worker thread.
struct Batch {
  MonteCarloSummary summary;
  std::vector<std::optional<TrialRow>> rows;
};

Batch run_batch(const RunConfig& cfg, const Scenario& sc, const std::filesystem::path& dir, const std::string& prefix) {
  Batch b;
  b.rows.resize(cfg.trials);
  MonteCarloOptions opts;
  opts.threads = cfg.threads;
  const double window_start = sc.duration * (1.0 - opts.window_fraction);
  opts.on_trial = [&](std::size_t i, const TrajectoryLog& log) {
    write_trajectory_csv(dir / trial_file(prefix, i), log);
    b.rows[i] = TrialRow{log.seed, log.records.front().dist_tilde, log.records.back().dist_tilde,
                         window_stats(log, window_start), log.min_sigma_hat};
  };
  b.summary = monte_carlo(sc, cfg.trials, opts);
  return b;
}

void put(std::ostream& os, const std::string& key, double v) { os << key << ": " << format_double(v) << '\n'; }

void scenario_header(std::ostream& os, const RunConfig& cfg, const Scenario& sc) {
  os << "scenario: " << cfg.source << '\n';
  os << "config_hash: " << config_hash(sc) << '\n';
  os << "base_seed: " << sc.seed << '\n';
  os << "trials: " << cfg.trials << '\n';
  put(os, "duration", sc.duration);
  put(os, "dt", sc.dt);
  os << "decimation: " << sc.decimation << '\n';
  os << "noise_model: " << to_string(sc.noise_model) << '\n';
}

void batch_section(std::ostream& os, const std::string& prefix, const Batch& b) {
  const auto& s = b.summary;
  os << prefix << "successful_trials: " << s.n_trials << '\n';
  os << prefix << "failed_trials: " << s.failures.size() << '\n';
  put(os, prefix + "window_start", s.window_start);
  if (s.n_trials > 0) {
    put(os, prefix + "initial_dist_tilde_mean", s.mean_dist.front());
    put(os, prefix + "final_dist_tilde_mean", s.mean_dist.back());
    put(os, prefix + "steady_mean_dist_tilde", s.steady_mean_dist);
    put(os, prefix + "steady_sem_dist_tilde", s.steady_sem_dist);
    put(os, prefix + "steady_mean_sq_error", s.steady_mean_sq_error);
    put(os, prefix + "steady_sem_sq_error", s.steady_sem_sq_error);
  }
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    if (!b.rows[i]) continue;
    const auto& r = *b.rows[i];
    os << prefix << "trial " << i << ": seed=" << r.seed << " file=" << trial_file(prefix, i)
       << " initial_dist_tilde=" << format_double(r.initial_dist) << " final_dist_tilde=" << format_double(r.final_dist)
       << " steady_mean_dist_tilde=" << format_double(r.window.mean_dist)
       << " min_dist_tilde=" << format_double(r.window.min_dist)
       << " min_sigma_hat=" << format_double(r.min_sigma_hat) << '\n';
  }
  for (const auto& f : s.failures) {
    os << prefix << "failure " << f.trial << ": seed=" << f.seed << " " << f.message << '\n';
  }
}

int report_failures(const MonteCarloSummary& s, const std::string& label, std::ostream& err) {
  for (const auto& f : s.failures) err << label << "trial " << f.trial << " (seed " << f.seed << ") aborted: " << f.message << '\n';
  return s.failures.empty() ? kExitOk : kExitRuntime;
}

int classify(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::NotAntisymmetric:
    case ErrorCode::NotSymmetric:
    case ErrorCode::NonUnitAxis:
    case ErrorCode::CollinearPair:
    case ErrorCode::RankDeficient:
    case ErrorCode::DegenerateVector:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return classify(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.scenario.validate();
    if (cfg.trials < 1) throw Error(ErrorCode::ConfigError, "--trials must be >= 1");
    const auto dir = prepare_out_dir(cfg);
    const Batch b = run_batch(cfg, cfg.scenario, dir, "");

    std::ostringstream os;
    scenario_header(os, cfg, cfg.scenario);
    os << "filter: " << to_string(cfg.scenario.filter) << '\n';
    batch_section(os, "", b);
    write_text(dir / "summary.txt", os.str());

    out << "wrote " << b.summary.n_trials << " trajectory file(s) and summary.txt to " << dir.string() << '\n';
    if (b.summary.n_trials > 0) {
      out << "initial dist_tilde " << format_double(b.summary.mean_dist.front()) << ", final "
          << format_double(b.summary.mean_dist.back()) << ", steady-state mean "
          << format_double(b.summary.steady_mean_dist) << '\n';
    }
    return report_failures(b.summary, "", err);
  });
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    cfg.scenario.validate();
    if (cfg.trials < 1) throw Error(ErrorCode::ConfigError, "--trials must be >= 1");
    const auto dir = prepare_out_dir(cfg);
    Scenario stochastic = cfg.scenario;
    stochastic.filter = FilterKind::stochastic;
    Scenario baseline = cfg.scenario;
    baseline.filter = FilterKind::baseline;
    const Batch a = run_batch(cfg, stochastic, dir, "stochastic_");
    const Batch b = run_batch(cfg, baseline, dir, "baseline_");

    std::ostringstream os;
    scenario_header(os, cfg, stochastic);
    batch_section(os, "stochastic_", a);
    batch_section(os, "baseline_", b);
    // Paired differences over trials both filters completed.
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      if (a.rows[i] && b.rows[i]) {
        sum += a.rows[i]->window.mean_dist - b.rows[i]->window.mean_dist;
        ++pairs;
      }
    }
    os << "paired_trials: " << pairs << '\n';
    if (pairs > 0) put(os, "paired_mean_steady_dist_diff", sum / static_cast<double>(pairs));
    write_text(dir / "summary.txt", os.str());

    out << "wrote paired trajectories and summary.txt to " << dir.string() << '\n';
    if (a.summary.n_trials > 0 && b.summary.n_trials > 0) {
      out << "steady-state mean dist_tilde: stochastic " << format_double(a.summary.steady_mean_dist) << ", baseline "
          << format_double(b.summary.steady_mean_dist) << '\n';
    }
    const int ra = report_failures(a.summary, "stochastic ", err);
    const int rb = report_failures(b.summary, "baseline ", err);
    return std::max(ra, rb);
  });
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto results = run_verification(opts);
    out << std::left << std::setw(30) << "property" << std::right << std::setw(9) << "samples" << std::setw(14)
        << "max_violation" << std::setw(12) << "tolerance" << std::setw(10) << "seconds" << "  result\n";
    for (const auto& r : results) {
      out << std::left << std::setw(30) << r.name << std::right << std::setw(9) << r.samples << std::setw(14)
          << std::setprecision(3) << r.max_violation << std::setw(12) << r.tolerance << std::setw(10) << std::fixed
          << r.seconds << std::defaultfloat << "  " << (r.passed() ? "PASS" : "FAIL") << '\n';
    }
    if (all_passed(results)) {
      out << "all " << results.size() << " properties passed\n";
      return kExitOk;
    }
    for (const auto& r : results) {
      if (!r.passed()) err << "FAILED: " << r.name << " (" << r.violations << " of " << r.samples << " samples)\n";
    }
    return kExitVerify;
  });
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic attitude filter on SO(3): simulation, comparison and verification"};
  app.require_subcommand(1);

  std::string builtin;
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> duration;
  std::optional<std::string> filter;
  std::optional<std::size_t> decimate;
  std::vector<std::string> sets;
  bool full_rate = false;
  std::size_t trials = 1;
  unsigned threads = 0;
  std::string out_dir;

  auto add_run_options = [&](CLI::App* sub, bool with_filter) {
    auto* b = sub->add_option("--builtin", builtin, "Built-in scenario (paper)")->check(CLI::IsMember({"paper"}));
    auto* s = sub->add_option("--scenario", scenario_path, "Scenario file (key = value lines)");
    b->excludes(s);
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--dt", dt, "Integration step [s]");
    sub->add_option("--duration", duration, "Simulated horizon [s]");
    sub->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    if (with_filter) {
      sub->add_option("--filter", filter, "stochastic or baseline")
          ->check(CLI::IsMember({"stochastic", "baseline"}));
    } else {
      sub->add_option("--filter", filter, "Not accepted: compare always runs both filters");
    }
    auto* d = sub->add_option("--decimate", decimate, "Log every n-th step")->check(CLI::PositiveNumber);
    auto* f = sub->add_flag("--full-rate", full_rate, "Log every step");
    d->excludes(f);
    sub->add_option("--set", sets, "Override a scenario key, e.g. --set gains.k_w=10 (repeatable)");
    sub->add_option("--out", out_dir, std::string("Output directory (default: $") + kOutDirEnv + " or ./so3filter_out)");
    sub->add_option("--threads", threads, "Worker threads (0 = all cores)");
  };

  auto* run_cmd = app.add_subcommand("run", "Simulate and write trajectory CSVs plus a summary");
  add_run_options(run_cmd, true);
  auto* cmp_cmd = app.add_subcommand("compare", "Run the stochastic filter and the baseline on identical noise");
  add_run_options(cmp_cmd, false);
  auto* ver_cmd = app.add_subcommand("verify", "Run the property suites");
  std::string level = "fast";
  std::uint64_t verify_seed = VerifyOptions{}.seed;
  std::string only;
  ver_cmd->add_option("level", level, "fast (1e3 samples per property) or full (1e5)")
      ->check(CLI::IsMember({"fast", "full"}));
  ver_cmd->add_option("--seed", verify_seed, "Sampler seed");
  ver_cmd->add_option("--only", only, "Run only properties whose name starts with this prefix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (ver_cmd->parsed()) {
    VerifyOptions opts;
    opts.level = level == "full" ? VerifyLevel::full : VerifyLevel::fast;
    opts.seed = verify_seed;
    opts.filter = only;
    return cmd_verify(opts, out, err);
  }

  const bool comparing = cmp_cmd->parsed();
  return guarded(err, [&] {
    if (comparing && filter) throw Error(ErrorCode::ConfigError, "compare runs both filters; drop --filter");
    RunConfig cfg;
    Scenario base = paper_scenario();
    if (!scenario_path.empty()) {
      cfg.source = "file:" + scenario_path;
      base = load_scenario(scenario_path);
    }
    if (!sets.empty()) {
      std::string text;
      for (const auto& s : sets) text += s + '\n';
      base = parse_scenario(text, base);
      cfg.source += " +overrides";
    }
    if (seed) base.seed = *seed;
    if (dt) base.dt = *dt;
    if (duration) base.duration = *duration;
    if (filter) base.filter = *filter == "baseline" ? FilterKind::baseline : FilterKind::stochastic;
    if (decimate) base.decimation = *decimate;
    if (full_rate) base.decimation = 1;
    base.validate();
    cfg.scenario = base;
    cfg.trials = trials;
    cfg.threads = threads;
    cfg.out_dir = out_dir;
    return comparing ? cmd_compare(cfg, out, err) : cmd_run(cfg, out, err);
  });
}

}  // namespace so3filter::cli
