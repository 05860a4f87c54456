#include "dipolar/drivers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace dipolar {

namespace {

int worker_count(int requested, int count) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  return std::clamp(n, 1, std::max(1, count));
}

double to_double(std::string_view key, std::string_view s) {
  const std::string text(s);
  char* end = nullptr;
  const double x = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(x))
    throw ConfigError("bad number '" + text + "' in " + std::string(key));
  return x;
}

} // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& f) {
  const int workers = worker_count(threads, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i)
      f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error)
            error = std::current_exception();
        }
      }
    });
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

PointResult run_point(const RunConfig& config, int threads) {
  config.validate();
  std::vector<PigsResult> chains(config.chains);
  parallel_for(config.chains, threads, [&](int c) { chains[c] = run_pigs(config, c); });
  PointResult r;
  r.config = config;
  r.alpha = chains.front().alpha;
  r.stats.bisection.resize(config.bisection_levels);
  for (const auto& c : chains) {
    r.estimates = merge(r.estimates, finalize(c.accumulator));
    for (std::size_t l = 0; l < c.stats.bisection.size(); ++l) {
      r.stats.bisection[l].proposed += c.stats.bisection[l].proposed;
      r.stats.bisection[l].accepted += c.stats.bisection[l].accepted;
    }
    r.stats.end.proposed += c.stats.end.proposed;
    r.stats.end.accepted += c.stats.end.accepted;
    r.stats.rotation.proposed += c.stats.rotation.proposed;
    r.stats.rotation.accepted += c.stats.rotation.accepted;
    r.stats.negative_weight += c.stats.negative_weight;
    r.stats.weight_evaluations += c.stats.weight_evaluations;
    r.stats.bridge_stalls += c.stats.bridge_stalls;
    r.stats.envelope_violations += c.stats.envelope_violations;
  }
  r.backend_invalid = config.backend == Backend::mpe6 && r.stats.negative_fraction() > kNegativeWeightLimit;
  return r;
}

EstimatorRow make_row(const PointResult& r) {
  EstimatorRow row;
  const auto& c = r.config;
  row.g = c.params.g;
  row.u = c.params.u;
  row.n = c.n;
  row.geometry = c.geometry;
  row.tau = c.params.tau;
  row.beta = c.params.beta;
  row.method = "pigs";
  row.propagator = std::string(to_string(c.backend));
  row.phi_pol = phi_pol(r.estimates);
  row.phi_z = phi_z(r.estimates);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (r.estimates.square) {
    row.phi_xy = phi_xy(r.estimates);
    row.phi_checkerboard = phi_checkerboard(r.estimates);
  } else {
    row.phi_xy = {nan, nan};
    row.phi_checkerboard = {nan, nan};
  }
  const auto e = energy_estimators(r.estimates);
  row.v_mid = e.v_mid;
  row.e_total = e.e_total;
  row.samples = static_cast<long>(r.estimates.samples);
  if (r.backend_invalid)
    row.flags = "backend-invalid";
  return row;
}

EstimatorRow make_row(const MeanFieldPoint& p, const LatticeSystem& lattice) {
  EstimatorRow row;
  row.g = p.g;
  row.u = p.u;
  row.n = lattice.size();
  row.geometry = lattice.geometry;
  row.tau = std::numeric_limits<double>::quiet_NaN();
  row.beta = std::numeric_limits<double>::quiet_NaN();
  row.method = "meanfield";
  row.propagator = "scf";
  row.phi_pol = {p.phi_pol, 0.0};
  row.phi_z = {p.phi_z, 0.0};
  row.phi_xy = {p.phi_xy, std::isnan(p.phi_xy) ? p.phi_xy : 0.0};
  row.phi_checkerboard = {p.phi_checkerboard, std::isnan(p.phi_checkerboard) ? p.phi_checkerboard : 0.0};
  row.v_mid = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  row.e_total = {p.energy_per_particle, 0.0};
  row.samples = 0;
  row.flags = "seed=" + p.seed;
  return row;
}

std::vector<PointResult> pigs_phase_scan(const RunConfig& base, std::span<const double> g_grid,
                                         std::span<const double> u_grid, int threads) {
  if (g_grid.empty() || u_grid.empty())
    throw ConfigError("empty scan grid");
  std::vector<RunConfig> configs;
  for (double g : g_grid)
    for (double u : u_grid) {
      RunConfig c = base;
      c.params.g = g;
      c.params.u = u;
      c.checkpoint_path.clear();
      c.checkpoint_every = 0;
      c.validate();
      configs.push_back(c);
    }
  std::vector<PointResult> out(configs.size());
  parallel_for(static_cast<int>(configs.size()), threads, [&](int k) { out[k] = run_point(configs[k], 1); });
  return out;
}

ScanVariable parse_scan_variable(std::string_view s) {
  if (s == "tau")
    return ScanVariable::tau;
  if (s == "beta")
    return ScanVariable::beta;
  throw ConfigError("scan variable must be tau or beta");
}

std::vector<PointResult> convergence_scan(const RunConfig& base, ScanVariable vary, std::span<const double> values,
                                          int threads) {
  if (values.empty())
    throw ConfigError("empty value list");
  if (!std::is_sorted(values.begin(), values.end()))
    throw ConfigError("scan values must be sorted");
  std::vector<RunConfig> configs;
  for (double v : values) {
    RunConfig c = base;
    (vary == ScanVariable::tau ? c.params.tau : c.params.beta) = v;
    c.checkpoint_path.clear();
    c.checkpoint_every = 0;
    c.validate();
    configs.push_back(c);
  }
  std::vector<PointResult> out(configs.size());
  parallel_for(static_cast<int>(configs.size()), threads, [&](int k) { out[k] = run_point(configs[k], 1); });
  return out;
}

std::vector<QuantumnessRow> quantumness_scan(const RunConfig& base, std::string_view vary,
                                             std::span<const double> values, int threads) {
  if (vary != "g" && vary != "u")
    throw ConfigError("quantumness scan varies g or u");
  if (values.empty())
    throw ConfigError("empty value list");
  std::vector<double> g_grid, u_grid;
  if (vary == "g") {
    g_grid.assign(values.begin(), values.end());
    u_grid = {0.0};
  } else {
    g_grid = {0.0};
    u_grid.assign(values.begin(), values.end());
  }
  const auto points = pigs_phase_scan(base, g_grid, u_grid, threads);
  std::vector<QuantumnessRow> rows;
  for (const auto& p : points) {
    const auto& c = p.config;
    const auto lattice = build_lattice(c.geometry, c.n, c.convention, c.cutoff, c.params.g);
    const auto minimum = classical_minimum(lattice, c.params.u, c.params.g);
    rows.push_back(make_quantumness_row(c.geometry, c.n, c.params.g, c.params.u, energy_estimators(p.estimates).v_mid,
                                        minimum.energy_per_particle, minimum.pattern.name()));
  }
  return rows;
}

std::optional<double> crossover_midpoint(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DomainError("crossover needs at least two matching points");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi == *lo)
    return std::nullopt;
  const double mid = 0.5 * (*lo + *hi);
  const bool rising = y.front() < mid;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double a = y[k] - mid, b = y[k + 1] - mid;
    const bool crossed = rising ? (a < 0.0 && b >= 0.0) : (a > 0.0 && b <= 0.0);
    if (crossed)
      return x[k] + (x[k + 1] - x[k]) * (-a) / (b - a);
  }
  return std::nullopt;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string_view::npos)
      throw ConfigError("range must be start:stop:step");
    const double start = to_double("grid", text.substr(0, c1));
    const double stop = to_double("grid", text.substr(c1 + 1, c2 - c1 - 1));
    const double step = to_double("grid", text.substr(c2 + 1));
    if (!(step > 0.0) || stop < start)
      throw ConfigError("range needs step > 0 and stop >= start");
    const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long k = 0; k < count; ++k)
      out.push_back(start + k * step);
    return out;
  }
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(to_double("grid", text.substr(0, comma)));
    if (comma == std::string_view::npos)
      break;
    text = text.substr(comma + 1);
  }
  if (out.empty())
    throw ConfigError("empty grid");
  return out;
}

} // namespace dipolar
