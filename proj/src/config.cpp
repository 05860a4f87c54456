#include "dipolar/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dipolar {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  const std::string text(v);
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(x))
    throw ConfigError("key '" + std::string(key) + "': not a number: '" + text + "'");
  return x;
}

template <class Int> Int to_integer(std::string_view key, std::string_view v) {
  Int x{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + std::string(key) + "': not an integer: '" + std::string(v) + "'");
  return x;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string canonical_body(const RunConfig& c) {
  std::ostringstream os;
  os << "geometry = " << to_string(c.geometry) << '\n'
     << "n = " << c.n << '\n'
     << "g = " << format_double(c.params.g) << '\n'
     << "u = " << format_double(c.params.u) << '\n'
     << "tau = " << format_double(c.params.tau) << '\n'
     << "beta = " << format_double(c.params.beta) << '\n'
     << "backend = " << to_string(c.backend) << '\n'
     << "trial = " << to_string(c.trial) << '\n'
     << "seed = " << c.seed << '\n'
     << "stream = " << c.stream << '\n'
     << "equilibration_sweeps = " << c.equilibration_sweeps << '\n'
     << "measurement_sweeps = " << c.measurement_sweeps << '\n'
     << "chains = " << c.chains << '\n'
     << "convention = " << to_string(c.convention) << '\n'
     << "cutoff = " << c.cutoff.describe() << '\n'
     << "bisection_levels = " << c.bisection_levels << '\n'
     << "rotation_max_angle = " << format_double(c.rotation_max_angle) << '\n'
     << "n_grid = " << c.n_grid << '\n';
  return os.str();
}

} // namespace

CutoffPolicy parse_cutoff(std::string_view v) {
  const auto colon = v.find(':');
  if (colon == std::string_view::npos)
    throw ConfigError("cutoff must be residual:<tol> or radius:<r>");
  const auto kind = v.substr(0, colon);
  const double value = to_double("cutoff", v.substr(colon + 1));
  if (!(value > 0.0))
    throw ConfigError("cutoff value must be positive");
  if (kind == "residual")
    return CutoffPolicy::residual(value);
  if (kind == "radius")
    return CutoffPolicy::radius(value);
  throw ConfigError("unknown cutoff policy '" + std::string(kind) + "'");
}

void RunConfig::validate() const {
  params.validate();
  if (!admissible_size(geometry, n))
    throw ConfigError("n = " + std::to_string(n) + " is not an admissible " + std::string(to_string(geometry)) +
                      " supercell size");
  if (params.links() % 2 != 0)
    throw ConfigError("beta / tau must be even so that a middle bead exists");
  if (equilibration_sweeps < 0 || measurement_sweeps < 64)
    throw ConfigError("need equilibration_sweeps >= 0 and measurement_sweeps >= 64");
  if (chains < 1)
    throw ConfigError("chains must be at least 1");
  if (bisection_levels < 1 || bisection_levels > 10)
    throw ConfigError("bisection_levels must lie in [1, 10]");
  if (!(rotation_max_angle >= 0.0) || rotation_max_angle > 3.14159265358979323846 + 1e-12)
    throw ConfigError("rotation_max_angle must lie in [0, pi]");
  if (n_grid < (1 << 12))
    throw ConfigError("n_grid must be at least 4096");
  if (checkpoint_every < 0)
    throw ConfigError("checkpoint_every must be non-negative");
  if (checkpoint_every > 0 && checkpoint_path.empty())
    throw ConfigError("checkpoint_every set without checkpoint_path");
  (void)cutoff.radius_for(params.g);
}

Settings parse_settings(std::string_view text) {
  Settings out;
  std::map<std::string, int> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (seen[key]++)
      throw ConfigError("duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::string(trim(line.substr(eq + 1))));
  }
  return out;
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value) {
  if (key == "geometry")
    c.geometry = parse_geometry(value);
  else if (key == "n")
    c.n = to_integer<int>(key, value);
  else if (key == "g")
    c.params.g = to_double(key, value);
  else if (key == "u")
    c.params.u = to_double(key, value);
  else if (key == "tau")
    c.params.tau = to_double(key, value);
  else if (key == "beta")
    c.params.beta = to_double(key, value);
  else if (key == "backend")
    c.backend = parse_backend(value);
  else if (key == "trial")
    c.trial = parse_trial(value);
  else if (key == "seed")
    c.seed = to_integer<std::uint64_t>(key, value);
  else if (key == "stream")
    c.stream = to_integer<std::uint64_t>(key, value);
  else if (key == "equilibration_sweeps")
    c.equilibration_sweeps = to_integer<long>(key, value);
  else if (key == "measurement_sweeps")
    c.measurement_sweeps = to_integer<long>(key, value);
  else if (key == "chains")
    c.chains = to_integer<int>(key, value);
  else if (key == "convention")
    c.convention = parse_convention(value);
  else if (key == "cutoff")
    c.cutoff = parse_cutoff(value);
  else if (key == "bisection_levels")
    c.bisection_levels = to_integer<int>(key, value);
  else if (key == "rotation_max_angle")
    c.rotation_max_angle = to_double(key, value);
  else if (key == "n_grid")
    c.n_grid = to_integer<int>(key, value);
  else if (key == "checkpoint_path")
    c.checkpoint_path = std::string(value);
  else if (key == "checkpoint_every")
    c.checkpoint_every = to_integer<long>(key, value);
  else if (key == "output_path")
    c.output_path = std::string(value);
  else
    throw ConfigError("unknown key '" + std::string(key) + "'");
}

RunConfig config_from_settings(const Settings& settings) {
  // Geometry first: it decides the defaults for n and beta.
  Geometry geometry = Geometry::triangular;
  for (const auto& [key, value] : settings)
    if (key == "geometry")
      geometry = parse_geometry(value);
  RunConfig c = default_config(geometry);
  for (const auto& [key, value] : settings)
    apply_setting(c, key, value);
  return c;
}

RunConfig parse_config(std::string_view text) { return config_from_settings(parse_settings(text)); }

RunConfig load_config(const std::string& path) { return parse_config(read_config_text(path)); }

std::string read_config_text(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string to_text(const RunConfig& c) {
  std::string s = canonical_body(c);
  if (!c.checkpoint_path.empty())
    s += "checkpoint_path = " + c.checkpoint_path + "\n";
  if (c.checkpoint_every > 0)
    s += "checkpoint_every = " + std::to_string(c.checkpoint_every) + "\n";
  if (!c.output_path.empty())
    s += "output_path = " + c.output_path + "\n";
  return s;
}

std::uint64_t manifest_hash(const RunConfig& c) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canonical_body(c)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

RunConfig default_config(Geometry g) {
  RunConfig c;
  c.geometry = g;
  c.n = g == Geometry::triangular ? 12 : 16;
  c.params.beta = g == Geometry::triangular ? 5.1 : 4.2;
  c.params.tau = 0.0375;
  return c;
}

} // namespace dipolar
