#include "so3filter/csv.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "so3filter/errors.hpp"
#include "so3filter/scenario_io.hpp"

namespace so3filter {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

void put(std::string& line, double x) {
  if (!line.empty()) line += ',';
  line += format_double(x);
}

void put(std::string& line, const Vec3& v, double scale = 1.0) {
  for (int i = 0; i < 3; ++i) put(line, v[i] * scale);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols = {
      "t",          "dist_tilde",   "dist_weighted", "upsilon",      "bhat_x",       "bhat_y",
      "bhat_z",     "shat_x",       "shat_y",        "shat_z",       "btilde_x",     "btilde_y",
      "btilde_z",   "stilde_x",     "stilde_y",      "stilde_z",     "euler_true_z", "euler_true_y",
      "euler_true_x", "euler_hat_z", "euler_hat_y",  "euler_hat_x",  "v_potential"};
  return cols;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log) {
  std::string line;
  for (const auto& c : trajectory_columns()) {
    if (!line.empty()) line += ',';
    line += c;
  }
  out << line << '\n';
  for (const auto& r : log.records) {
    line.clear();
    put(line, r.t);
    put(line, r.dist_tilde);
    put(line, r.dist_weighted);
    put(line, r.upsilon);
    put(line, r.b_hat);
    put(line, r.sigma_hat);
    put(line, r.b_tilde);
    put(line, r.sigma_tilde);
    put(line, r.euler_true, kDeg);
    put(line, r.euler_hat, kDeg);
    put(line, r.v_potential);
    out << line << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  write_trajectory_csv(out, log);
  out.close();
  if (!out) throw Error(ErrorCode::InvalidArgument, "error while writing " + path.string());
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(ErrorCode::InvalidArgument, "no column named '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "empty CSV");
  table.header = split(line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::InvalidArgument, "CSV line " + std::to_string(line_no) + " has " +
                                                  std::to_string(cells.size()) + " cells, expected " +
                                                  std::to_string(table.header.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      try {
        row.push_back(parse_double(c));
      } catch (const Error&) {
        throw Error(ErrorCode::InvalidArgument, "CSV line " + std::to_string(line_no) + ": bad number '" + c + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  return read_csv(in);
}

}  // namespace so3filter
