#pragma once

// Trajectory CSV files: one header line, then one row per log record.
// Numbers use the shortest text that reads back to the same double, so a file
// round-trips exactly whatever the process locale. Lines end in LF.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "so3filter/harness.hpp"

namespace so3filter {

/// t, dist_tilde, dist_weighted, upsilon, bhat_x..z, shat_x..z, btilde_x..z, stilde_x..z,
/// euler_true_z/y/x, euler_hat_z/y/x, v_potential.
/// Euler angles are the ZYX sequence (yaw about z, pitch about y, roll about x) in degrees.
const std::vector<std::string>& trajectory_columns();

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);

/// Throws Error(InvalidArgument) if the file cannot be written.
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a named column; throws Error(InvalidArgument) if absent.
  std::size_t column(const std::string& name) const;
};

/// Reads a numeric CSV with a header line. Throws Error(InvalidArgument) on ragged or non-numeric rows.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace so3filter
