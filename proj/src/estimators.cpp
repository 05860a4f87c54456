#include "dipolar/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dipolar {

namespace {

constexpr double kPlateauChange = 0.05;
constexpr std::size_t kMinSamples = 64;
constexpr std::size_t kMinBlocks = 32;

double relative_change(double from, double to) {
  if (from == 0.0)
    return to == 0.0 ? 0.0 : 1.0;
  return std::abs(to - from) / from;
}

void require_square(const LatticeSystem& lattice) {
  if (lattice.geometry != Geometry::square)
    throw ConfigError("stripe and checkerboard order parameters need a square lattice");
}

Estimate combine(const Estimate& a, std::size_t na, const Estimate& b, std::size_t nb) {
  const double n = static_cast<double>(na + nb);
  return {(na * a.value + nb * b.value) / n, std::hypot(na * a.error, nb * b.error) / n};
}

Estimate from_series(const ScalarSeries& s) {
  const auto r = s.blocking();
  return {r.mean, r.error};
}

} // namespace

BlockingResult blocking_error(std::span<const double> series) {
  if (series.size() < kMinSamples)
    throw DomainError("blocking analysis needs at least 64 samples");
  BlockingResult out;
  out.mean = std::accumulate(series.begin(), series.end(), 0.0) / series.size();

  std::vector<double> x(series.begin(), series.end());
  std::vector<std::size_t> counts;
  while (x.size() >= 2) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    double c0 = 0.0;
    for (double v : x)
      c0 += (v - m) * (v - m);
    c0 /= x.size();
    out.level_errors.push_back(std::sqrt(c0 / (x.size() - 1)));
    counts.push_back(x.size());
    std::vector<double> next(x.size() / 2);
    for (std::size_t k = 0; k < next.size(); ++k)
      next[k] = 0.5 * (x[2 * k] + x[2 * k + 1]);
    x.swap(next);
  }

  const auto& e = out.level_errors;
  for (std::size_t l = 0; l + 2 < e.size(); ++l) {
    if (counts[l + 2] < kMinBlocks / 2)
      break;
    if (relative_change(e[l], e[l + 1]) < kPlateauChange && relative_change(e[l + 1], e[l + 2]) < kPlateauChange) {
      out.level = static_cast<int>(l);
      out.error = e[l];
      out.plateau = true;
      return out;
    }
  }
  out.error = 0.0;
  for (std::size_t l = 0; l < e.size() && counts[l] >= kMinBlocks; ++l)
    if (e[l] >= out.error) {
      out.error = e[l];
      out.level = static_cast<int>(l);
    }
  return out;
}

double ScalarSeries::mean() const {
  if (values.empty())
    throw DomainError("mean of an empty series");
  return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
}

double stripe_x(std::span<const Vec3> x, const LatticeSystem& lattice) {
  require_square(lattice);
  double s = 0.0;
  for (int k = 0; k < lattice.size(); ++k)
    s += (lattice.row(k) % 2 == 0 ? 1.0 : -1.0) * x[k].x();
  return std::abs(s) / lattice.size();
}

double stripe_y(std::span<const Vec3> x, const LatticeSystem& lattice) {
  require_square(lattice);
  double s = 0.0;
  for (int k = 0; k < lattice.size(); ++k)
    s += (lattice.column(k) % 2 == 0 ? 1.0 : -1.0) * x[k].y();
  return std::abs(s) / lattice.size();
}

double checkerboard(std::span<const Vec3> x, const LatticeSystem& lattice) {
  require_square(lattice);
  double s = 0.0;
  for (int k = 0; k < lattice.size(); ++k)
    s += ((lattice.row(k) + lattice.column(k)) % 2 == 0 ? 1.0 : -1.0) * x[k].z();
  return std::abs(s) / lattice.size();
}

BeadObservation observe(std::span<const Vec3> x, const LatticeSystem& lattice, double u, double g) {
  BeadObservation o;
  const double n = lattice.size();
  for (const auto& v : x) {
    o.mx += v.x();
    o.my += v.y();
    o.mz += v.z();
  }
  o.mx /= n;
  o.my /= n;
  o.mz /= n;
  if (lattice.geometry == Geometry::square) {
    o.stripe_x = stripe_x(x, lattice);
    o.stripe_y = stripe_y(x, lattice);
    o.checkerboard = checkerboard(x, lattice);
  }
  o.potential = total_potential(x, lattice, u, g) / n;
  return o;
}

void PolarizationAccumulator::add(const BeadObservation& middle, double energy_per_particle) {
  mx.values.push_back(middle.mx);
  my.values.push_back(middle.my);
  mz.values.push_back(middle.mz);
  sx.values.push_back(middle.stripe_x);
  sy.values.push_back(middle.stripe_y);
  cb.values.push_back(middle.checkerboard);
  v.values.push_back(middle.potential);
  e.values.push_back(energy_per_particle);
}

std::vector<ScalarSeries*> PolarizationAccumulator::all() { return {&mx, &my, &mz, &sx, &sy, &cb, &v, &e}; }

std::vector<const ScalarSeries*> PolarizationAccumulator::all() const {
  return {&mx, &my, &mz, &sx, &sy, &cb, &v, &e};
}

ComponentEstimates finalize(const PolarizationAccumulator& acc) {
  ComponentEstimates c;
  c.square = acc.square;
  c.samples = acc.size();
  c.mx = from_series(acc.mx);
  c.my = from_series(acc.my);
  c.mz = from_series(acc.mz);
  c.sx = from_series(acc.sx);
  c.sy = from_series(acc.sy);
  c.cb = from_series(acc.cb);
  c.v = from_series(acc.v);
  c.e = from_series(acc.e);
  return c;
}

ComponentEstimates merge(const ComponentEstimates& a, const ComponentEstimates& b) {
  if (a.samples == 0)
    return b;
  if (b.samples == 0)
    return a;
  if (a.square != b.square)
    throw DomainError("merging estimates from different geometries");
  ComponentEstimates c;
  c.square = a.square;
  c.samples = a.samples + b.samples;
  c.mx = combine(a.mx, a.samples, b.mx, b.samples);
  c.my = combine(a.my, a.samples, b.my, b.samples);
  c.mz = combine(a.mz, a.samples, b.mz, b.samples);
  c.sx = combine(a.sx, a.samples, b.sx, b.samples);
  c.sy = combine(a.sy, a.samples, b.sy, b.samples);
  c.cb = combine(a.cb, a.samples, b.cb, b.samples);
  c.v = combine(a.v, a.samples, b.v, b.samples);
  c.e = combine(a.e, a.samples, b.e, b.samples);
  return c;
}

Estimate vector_magnitude(const Estimate& a, const Estimate& b) {
  const double m = std::hypot(a.value, b.value);
  if (m == 0.0)
    return {0.0, std::sqrt(0.5 * (a.error * a.error + b.error * b.error))};
  return {m, std::hypot(a.value * a.error, b.value * b.error) / m};
}

Estimate phi_pol(const ComponentEstimates& c) {
  if (c.samples == 0)
    throw DomainError("order parameter of an empty accumulator");
  return vector_magnitude(c.mx, c.my);
}

Estimate phi_z(const ComponentEstimates& c) {
  if (c.samples == 0)
    throw DomainError("order parameter of an empty accumulator");
  return c.mz;
}

Estimate phi_xy(const ComponentEstimates& c) {
  if (!c.square)
    throw ConfigError("phi_xy is defined on square lattices only");
  if (c.samples == 0)
    throw DomainError("order parameter of an empty accumulator");
  return vector_magnitude(c.sx, c.sy);
}

Estimate phi_checkerboard(const ComponentEstimates& c) {
  if (!c.square)
    throw ConfigError("phi_checkerboard is defined on square lattices only");
  if (c.samples == 0)
    throw DomainError("order parameter of an empty accumulator");
  return c.cb;
}

EnergyEstimates energy_estimators(const ComponentEstimates& c) {
  if (c.samples == 0)
    throw DomainError("energy of an empty accumulator");
  return {c.v, c.e};
}

} // namespace dipolar
