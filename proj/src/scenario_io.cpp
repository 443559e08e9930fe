#include "so3filter/scenario_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "so3filter/errors.hpp"

namespace so3filter {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  os << msg;
  throw Error(ErrorCode::ConfigError, os.str());
}

class Entries {
 public:
  explicit Entries(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) fail(line_no, "empty key");
      if (value.empty()) fail(line_no, "empty value for '" + key + "'");
      if (entries_.count(key)) fail(line_no, "duplicate key '" + key + "'");
      entries_[key] = Entry{value, line_no, false};
    }
  }

  Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  bool has_prefix(std::string_view prefix) const {
    for (const auto& [k, v] : entries_) {
      if (k.compare(0, prefix.size(), prefix) == 0) return true;
    }
    return false;
  }

  void reject_unused() const {
    for (const auto& [k, v] : entries_) {
      if (!v.used) fail(v.line, "unknown key '" + k + "'");
    }
  }

 private:
  std::map<std::string, Entry> entries_;
};

double number(const Entry& e) {
  try {
    return parse_double(e.value);
  } catch (const Error&) {
    fail(e.line, "not a number: '" + e.value + "'");
  }
}

std::vector<double> numbers(const Entry& e, std::size_t count) {
  const auto tokens = split_ws(e.value);
  if (tokens.size() != count) {
    fail(e.line, "expected " + std::to_string(count) + " numbers, got " + std::to_string(tokens.size()));
  }
  std::vector<double> out;
  for (auto tok : tokens) {
    try {
      out.push_back(parse_double(tok));
    } catch (const Error&) {
      fail(e.line, "not a number: '" + std::string(tok) + "'");
    }
  }
  return out;
}

std::uint64_t unsigned_integer(const Entry& e) {
  std::uint64_t v = 0;
  const auto* first = e.value.data();
  const auto* last = first + e.value.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(e.line, "not a non-negative integer: '" + e.value + "'");
  return v;
}

void read(Entries& en, const std::string& key, double& out) {
  if (auto* e = en.find(key)) out = number(*e);
}

void read(Entries& en, const std::string& key, Vec3& out) {
  if (auto* e = en.find(key)) {
    const auto v = numbers(*e, 3);
    out = {v[0], v[1], v[2]};
  }
}

// Either `<prefix>.attitude` (nine numbers, row-major) or `<prefix>.angle_deg` with `<prefix>.axis`.
void read_attitude(Entries& en, const std::string& prefix, Rotation& out) {
  Entry* mat = en.find(prefix + ".attitude");
  Entry* angle = en.find(prefix + ".angle_deg");
  Entry* axis = en.find(prefix + ".axis");
  if (mat && (angle || axis)) fail(mat->line, prefix + ": give either attitude or angle_deg/axis, not both");
  if (mat) {
    const auto v = numbers(*mat, 9);
    Mat3 m;
    m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    try {
      out = Rotation(m);
    } catch (const Error& err) {
      fail(mat->line, err.what());
    }
    return;
  }
  if (!angle && !axis) return;
  if (!angle || !axis) fail((angle ? angle : axis)->line, prefix + ": angle_deg and axis must be given together");
  const auto u = numbers(*axis, 3);
  const Vec3 uv(u[0], u[1], u[2]);
  if (!(uv.norm() > 0.0)) fail(axis->line, prefix + ".axis must be non-zero");
  out = from_angle_axis({number(*angle) * std::numbers::pi / 180.0, uv.normalized()});
}

void append(std::ostringstream& os, const std::string& key, const Vec3& v) {
  os << key << " = " << format_double(v[0]) << ' ' << format_double(v[1]) << ' ' << format_double(v[2]) << '\n';
}

void append(std::ostringstream& os, const std::string& key, double v) {
  os << key << " = " << format_double(v) << '\n';
}

void append(std::ostringstream& os, const std::string& key, const Rotation& r) {
  os << key << " =";
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) os << ' ' << format_double(r(i, j));
  }
  os << '\n';
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorCode::ConfigError, "not a number: '" + std::string(token) + "'");
  }
  return v;
}

Scenario parse_scenario(std::string_view text, const Scenario& base) {
  Entries en(text);
  Scenario sc = base;

  read(en, "run.duration", sc.duration);
  read(en, "run.dt", sc.dt);
  if (auto* e = en.find("run.seed")) sc.seed = unsigned_integer(*e);
  if (auto* e = en.find("run.decimation")) sc.decimation = static_cast<std::size_t>(unsigned_integer(*e));
  if (auto* e = en.find("run.filter")) {
    if (e->value == "stochastic") sc.filter = FilterKind::stochastic;
    else if (e->value == "baseline") sc.filter = FilterKind::baseline;
    else fail(e->line, "run.filter must be 'stochastic' or 'baseline'");
  }
  if (auto* e = en.find("run.noise_model")) {
    if (e->value == "measurement") sc.noise_model = NoiseModel::measurement;
    else if (e->value == "truth") sc.noise_model = NoiseModel::truth;
    else fail(e->line, "run.noise_model must be 'measurement' or 'truth'");
  }

  read(en, "omega.offset", sc.omega.offset);
  read(en, "omega.amplitude", sc.omega.amplitude);
  read(en, "omega.frequency", sc.omega.frequency);
  read(en, "omega.phase", sc.omega.phase);

  read(en, "gyro.bias", sc.gyro.bias);
  read(en, "gyro.q_offset", sc.gyro.q_diag.offset);
  read(en, "gyro.q_amplitude", sc.gyro.q_diag.amplitude);
  read(en, "gyro.q_frequency", sc.gyro.q_diag.frequency);
  read(en, "gyro.q_phase", sc.gyro.q_diag.phase);
  read(en, "gyro.q_max", sc.gyro.q_max);

  if (en.has_prefix("refs.")) {
    Entry* count = en.find("refs.count");
    if (!count) fail(0, "refs.count is required when any refs.* key is given");
    const auto n = unsigned_integer(*count);
    if (n < 2 || n > 64) fail(count->line, "refs.count must be between 2 and 64");
    sc.refs.refs.assign(n, ReferenceVector{});
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::string p = "refs." + std::to_string(i + 1) + ".";
      auto& r = sc.refs.refs[i];
      if (!en.find(p + "inertial")) fail(count->line, p + "inertial is required");
      read(en, p + "inertial", r.inertial);
      read(en, p + "bias", r.bias_body);
      read(en, p + "noise_std", r.noise_std);
      read(en, p + "weight", r.weight);
    }
  }

  read_attitude(en, "truth", sc.r0_true);
  read_attitude(en, "estimate", sc.initial_estimate.r_hat);
  read(en, "estimate.b_hat", sc.initial_estimate.b_hat);
  read(en, "estimate.sigma_hat", sc.initial_estimate.sigma_hat);

  read(en, "gains.k_w", sc.gains.k_w);
  read(en, "gains.k_b", sc.gains.k_b);
  read(en, "gains.k_sigma", sc.gains.k_sigma);
  read(en, "gains.gamma", sc.gains.gamma);
  read(en, "gains.epsilon", sc.gains.epsilon);
  read(en, "gains.upsilon_floor", sc.gains.upsilon_floor);

  en.reject_unused();
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, const Scenario& base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open scenario file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), base);
}

std::string format_scenario(const Scenario& sc) {
  std::ostringstream os;
  append(os, "run.duration", sc.duration);
  append(os, "run.dt", sc.dt);
  os << "run.seed = " << sc.seed << '\n';
  os << "run.decimation = " << sc.decimation << '\n';
  os << "run.filter = " << to_string(sc.filter) << '\n';
  os << "run.noise_model = " << to_string(sc.noise_model) << '\n';
  append(os, "omega.offset", sc.omega.offset);
  append(os, "omega.amplitude", sc.omega.amplitude);
  append(os, "omega.frequency", sc.omega.frequency);
  append(os, "omega.phase", sc.omega.phase);
  append(os, "gyro.bias", sc.gyro.bias);
  append(os, "gyro.q_offset", sc.gyro.q_diag.offset);
  append(os, "gyro.q_amplitude", sc.gyro.q_diag.amplitude);
  append(os, "gyro.q_frequency", sc.gyro.q_diag.frequency);
  append(os, "gyro.q_phase", sc.gyro.q_diag.phase);
  append(os, "gyro.q_max", sc.gyro.q_max);
  os << "refs.count = " << sc.refs.size() << '\n';
  for (std::size_t i = 0; i < sc.refs.size(); ++i) {
    const std::string p = "refs." + std::to_string(i + 1) + ".";
    const auto& r = sc.refs.refs[i];
    append(os, p + "inertial", r.inertial);
    append(os, p + "bias", r.bias_body);
    append(os, p + "noise_std", r.noise_std);
    append(os, p + "weight", r.weight);
  }
  append(os, "truth.attitude", sc.r0_true);
  append(os, "estimate.attitude", sc.initial_estimate.r_hat);
  append(os, "estimate.b_hat", sc.initial_estimate.b_hat);
  append(os, "estimate.sigma_hat", sc.initial_estimate.sigma_hat);
  append(os, "gains.k_w", sc.gains.k_w);
  append(os, "gains.k_b", sc.gains.k_b);
  append(os, "gains.k_sigma", sc.gains.k_sigma);
  append(os, "gains.gamma", sc.gains.gamma);
  append(os, "gains.epsilon", sc.gains.epsilon);
  append(os, "gains.upsilon_floor", sc.gains.upsilon_floor);
  return os.str();
}

std::string config_hash(const Scenario& sc) {
  const std::string text = format_scenario(sc);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string_view line(text.data() + pos, (nl == std::string::npos ? text.size() : nl + 1) - pos);
    pos = (nl == std::string::npos) ? text.size() : nl + 1;
    if (line.rfind("run.seed", 0) == 0) continue;
    for (unsigned char c : line) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace so3filter
