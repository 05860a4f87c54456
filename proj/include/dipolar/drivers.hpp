#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dipolar/config.hpp"
#include "dipolar/estimators.hpp"
#include "dipolar/meanfield.hpp"
#include "dipolar/report.hpp"
#include "dipolar/sampler.hpp"

namespace dipolar {

/// Merged outcome of all chains of one configuration.
struct PointResult {
  RunConfig config;
  ComponentEstimates estimates;
  MoveStats stats;
  double alpha = 0.0;
  bool backend_invalid = false;
};

/// Runs config.chains chains (in parallel, at most `threads` at a time) and
/// merges them.
PointResult run_point(const RunConfig& config, int threads = 0);

EstimatorRow make_row(const PointResult& r);
EstimatorRow make_row(const MeanFieldPoint& p, const LatticeSystem& lattice);

/// Applies f(0 .. count-1) on up to `threads` worker threads (0 = hardware
/// concurrency). Results are placed by index, so output order never depends
/// on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& f);

/// One PIGS run per (g, u) grid point, g outermost.
std::vector<PointResult> pigs_phase_scan(const RunConfig& base, std::span<const double> g_grid,
                                         std::span<const double> u_grid, int threads = 0);

enum class ScanVariable { tau, beta };
ScanVariable parse_scan_variable(std::string_view s);

/// One run per value of tau or beta, everything else fixed.
std::vector<PointResult> convergence_scan(const RunConfig& base, ScanVariable vary, std::span<const double> values,
                                          int threads = 0);

/// PIGS <V>/N next to the classical minimum along g (u = 0) or u (g = 0).
std::vector<QuantumnessRow> quantumness_scan(const RunConfig& base, std::string_view vary,
                                             std::span<const double> values, int threads = 0);

/// Value of x where y first crosses (min y + max y) / 2, by linear
/// interpolation between neighbouring grid points. Empty if y is constant.
std::optional<double> crossover_midpoint(std::span<const double> x, std::span<const double> y);

/// Parses "a,b,c" or "start:stop:step" into a list of doubles.
std::vector<double> parse_grid(std::string_view text);

} // namespace dipolar
