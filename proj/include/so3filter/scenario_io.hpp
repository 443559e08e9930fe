#pragma once

// Flat key/value scenario files.
//
//   # comment
//   run.duration = 10
//   refs.count = 2
//   refs.1.inertial = 0.57735 -0.57735 0.57735
//   estimate.angle_deg = 179
//   estimate.axis = 1 5 3
//
// Keys are dotted; vectors are whitespace-separated numbers. A file is applied on top of
// a base scenario (the built-in paper scenario by default), so it only needs the keys it
// changes. Unknown or repeated keys are errors. Numbers are read and written with
// std::from_chars / std::to_chars, independent of the process locale.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "so3filter/harness.hpp"

namespace so3filter {

/// Shortest decimal text that reads back to exactly `x` ("nan", "inf" for non-finite values).
std::string format_double(double x);

/// Whole-token parse; throws Error(ConfigError) on malformed input.
double parse_double(std::string_view token);

/// Applies `text` on top of `base`. Throws Error(ConfigError) naming the offending line.
/// The result is validated.
Scenario parse_scenario(std::string_view text, const Scenario& base = paper_scenario());

Scenario load_scenario(const std::filesystem::path& path, const Scenario& base = paper_scenario());

/// Canonical text listing every key; parse_scenario(format_scenario(s)) reproduces s exactly.
std::string format_scenario(const Scenario& sc);

/// FNV-1a 64 of the canonical text with the seed line removed, as 16 hex digits.
std::string config_hash(const Scenario& sc);

}  // namespace so3filter
