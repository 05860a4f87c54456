#pragma once

#include <span>
#include <string>
#include <vector>

#include "dipolar/lattice.hpp"
#include "dipolar/types.hpp"

namespace dipolar {

struct BlockingResult {
  double mean = 0.0;
  double error = 0.0;
  /// Block level (number of pairwise halvings) the error was taken from.
  int level = 0;
  /// False when no plateau was detected; error is then the largest level
  /// estimate with at least 32 blocks.
  bool plateau = false;
  std::vector<double> level_errors;
};

/// Flyvbjerg-Petersen blocking. The plateau is the first level whose error
/// changes by less than 5% over each of the next two doublings.
/// Throws DomainError for fewer than 64 samples.
BlockingResult blocking_error(std::span<const double> series);

/// Per-sweep values of one observable.
struct ScalarSeries {
  std::string name;
  std::vector<double> values;

  double mean() const;
  BlockingResult blocking() const { return blocking_error(values); }
};

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Per-configuration order-parameter ingredients of one bead.
struct BeadObservation {
  double mx = 0.0, my = 0.0, mz = 0.0;
  /// Square lattice only; zero otherwise.
  double stripe_x = 0.0, stripe_y = 0.0, checkerboard = 0.0;
  /// Potential energy per particle.
  double potential = 0.0;
};

/// (1/N) |sum_k (-1)^row(k) n^x_k| on a square lattice (rows are the b
/// coordinate, sites row-major). Throws ConfigError on other geometries.
double stripe_x(std::span<const Vec3> x, const LatticeSystem& lattice);
/// (1/N) |sum_k (-1)^column(k) n^y_k|.
double stripe_y(std::span<const Vec3> x, const LatticeSystem& lattice);
/// (1/N) |sum_k (-1)^(row + column) n^z_k|.
double checkerboard(std::span<const Vec3> x, const LatticeSystem& lattice);

BeadObservation observe(std::span<const Vec3> x, const LatticeSystem& lattice, double u, double g);

/// Running series of every per-sweep observable, one entry per measurement
/// sweep. Middle-bead quantities feed the order parameters and V; the end
/// beads feed the mixed energy estimator.
struct PolarizationAccumulator {
  bool square = false;
  ScalarSeries mx{"mx", {}}, my{"my", {}}, mz{"mz", {}};
  ScalarSeries sx{"stripe_x", {}}, sy{"stripe_y", {}}, cb{"checkerboard", {}};
  ScalarSeries v{"v_mid", {}}, e{"e_total", {}};

  void add(const BeadObservation& middle, double energy_per_particle);
  std::size_t size() const { return mx.values.size(); }
  std::vector<ScalarSeries*> all();
  std::vector<const ScalarSeries*> all() const;
};

/// Finalised means and errors of the raw components, mergeable across
/// independent chains.
struct ComponentEstimates {
  bool square = false;
  std::size_t samples = 0;
  Estimate mx, my, mz, sx, sy, cb, v, e;
};

ComponentEstimates finalize(const PolarizationAccumulator& acc);

/// Sample-count weighted combination of independent chains.
ComponentEstimates merge(const ComponentEstimates& a, const ComponentEstimates& b);

/// sqrt(<mx>^2 + <my>^2). Throws DomainError if no samples were taken.
Estimate phi_pol(const ComponentEstimates& c);
Estimate phi_z(const ComponentEstimates& c);
/// sqrt(<stripe_x>^2 + <stripe_y>^2); ConfigError unless square.
Estimate phi_xy(const ComponentEstimates& c);
Estimate phi_checkerboard(const ComponentEstimates& c);

/// Middle-bead potential and end-point mixed energy, both per particle.
struct EnergyEstimates {
  Estimate v_mid;
  Estimate e_total;
};
EnergyEstimates energy_estimators(const ComponentEstimates& c);

/// Error of sqrt(a^2 + b^2) by linear propagation.
Estimate vector_magnitude(const Estimate& a, const Estimate& b);

} // namespace dipolar
