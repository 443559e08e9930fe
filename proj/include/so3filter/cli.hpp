#pragma once

// The so3filter command line: run, compare and verify.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "so3filter/harness.hpp"
#include "so3filter/verify.hpp"

namespace so3filter::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitVerify = 3;

/// Output directory used when --out is not given (falls back to ./so3filter_out).
inline constexpr const char* kOutDirEnv = "SO3FILTER_OUT";

struct RunConfig {
  std::string source = "builtin:paper";  // or "file:<path>"
  Scenario scenario = paper_scenario();
  std::size_t trials = 1;
  std::filesystem::path out_dir;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Runs the configured trials, writes trial_NNNN.csv per trial and summary.txt.
int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Runs the stochastic filter and the baseline on the same seeds; writes stochastic_trial_NNNN.csv,
/// baseline_trial_NNNN.csv and summary.txt.
int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Prints one line per property and returns kExitVerify if any failed.
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace so3filter::cli
