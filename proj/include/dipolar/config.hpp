#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dipolar/lattice.hpp"
#include "dipolar/propagator.hpp"
#include "dipolar/trial.hpp"
#include "dipolar/units.hpp"

namespace dipolar {

/// Everything needed to reproduce one PIGS run. Text form: one `key = value`
/// per line, `#` starts a comment; keys are listed in docs/schema.md.
struct RunConfig {
  Geometry geometry = Geometry::triangular;
  int n = 12;
  ReducedParams params;
  Backend backend = Backend::primitive;
  TrialKind trial = TrialKind::hartree;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  long equilibration_sweeps = 2000;
  long measurement_sweeps = 20000;
  /// Independent chains (streams stream, stream+1, ...) merged per point.
  int chains = 1;
  Convention convention = Convention::periodic_sum;
  CutoffPolicy cutoff = CutoffPolicy::residual();
  int bisection_levels = 3;
  double rotation_max_angle = 3.14159265358979323846;
  int n_grid = 1 << 16;
  std::string checkpoint_path;
  long checkpoint_every = 0;
  std::string output_path;

  /// Throws ConfigError on any inconsistency.
  void validate() const;
};

/// Ordered key/value pairs of a config text; duplicate keys are an error.
using Settings = std::vector<std::pair<std::string, std::string>>;
Settings parse_settings(std::string_view text);
void apply_setting(RunConfig& c, std::string_view key, std::string_view value);
/// Starts from default_config(geometry named in the settings, triangular if
/// none) and applies the settings in order.
RunConfig config_from_settings(const Settings& settings);

/// "residual:<tol>" or "radius:<r>".
CutoffPolicy parse_cutoff(std::string_view text);

RunConfig parse_config(std::string_view text);
std::string read_config_text(const std::string& path);
RunConfig load_config(const std::string& path);
/// Canonical text: every key, fixed order, round-trip exact doubles.
std::string to_text(const RunConfig& c);
/// FNV-1a of the canonical text without output and checkpoint locations.
std::uint64_t manifest_hash(const RunConfig& c);

/// Defaults for a geometry: beta 5.1 (triangular) or 4.2 (square),
/// tau 0.0375.
RunConfig default_config(Geometry g);

} // namespace dipolar
