#include "dipolar/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dipolar {

namespace {

constexpr double kTermTolerance = 1e-12;
constexpr double kFourPi = 4.0 * std::numbers::pi;
// Relative level below which tabulated values carry no information.
constexpr double kFloor = 1e-13;
constexpr int kGuideSize = 4096;

double term_bound(int l, double t) { return (2.0 * l + 1.0) / kFourPi * std::exp(-t * l * (l + 1.0)); }

double kernel_series(double x, double t, int l_cut) {
  double p_prev = 1.0, p = x;
  double sum = 1.0 / kFourPi;
  if (l_cut >= 1)
    sum += 3.0 / kFourPi * x * std::exp(-2.0 * t);
  for (int l = 1; l < l_cut; ++l) {
    const double p_next = ((2.0 * l + 1.0) * x * p - l * p_prev) / (l + 1.0);
    p_prev = p;
    p = p_next;
    const int lp = l + 1;
    sum += (2.0 * lp + 1.0) / kFourPi * p * std::exp(-t * lp * (lp + 1.0));
  }
  return sum;
}

void check_tau(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("kernel time step must be positive");
}

} // namespace

std::string_view to_string(Backend b) { return b == Backend::mpe6 ? "mpe6" : "primitive"; }

Backend parse_backend(std::string_view s) {
  if (s == "primitive")
    return Backend::primitive;
  if (s == "mpe6")
    return Backend::mpe6;
  throw ConfigError("unknown propagator backend '" + std::string(s) + "'");
}

int kernel_truncation(double tau_tilde) {
  check_tau(tau_tilde);
  int l = 0;
  while (term_bound(l + 1, tau_tilde) >= kTermTolerance)
    ++l;
  return l;
}

double free_rotor_kernel(double cos_gamma, double tau_tilde) {
  if (!(cos_gamma >= -1.0 && cos_gamma <= 1.0))
    throw DomainError("cos(gamma) outside [-1, 1]");
  return kernel_series(cos_gamma, tau_tilde, kernel_truncation(tau_tilde));
}

PropagatorTable::PropagatorTable(double tau_tilde, int n_grid) : tau_(tau_tilde) {
  check_tau(tau_tilde);
  if (n_grid < (1 << 12))
    throw DomainError("propagator table needs at least 4096 grid points");
  l_cut_ = kernel_truncation(tau_tilde);
  step_ = 2.0 / (n_grid - 1);
  inv_step_ = (n_grid - 1) / 2.0;
  values_.resize(n_grid);
  for (int k = 0; k < n_grid; ++k)
    values_[k] = kernel_series(k == n_grid - 1 ? 1.0 : node(k), tau_, l_cut_);

  const double top = values_.back();
  const double lowest = *std::min_element(values_.begin(), values_.end());
  // The exact kernel is a positive density for these steps; anything more
  // negative than roundoff means the series itself is broken.
  if (!(top > 0.0) || lowest < -1e-10 * top)
    throw NumericalError("free-rotor kernel is not positive on the grid");
  const double floor = kFloor * top;
  for (int k = n_grid - 2; k >= 0; --k) {
    const double v = std::max(std::min(values_[k], values_[k + 1]), floor);
    if (v != values_[k])
      ++floored_;
    values_[k] = v;
    if (v == floor && floor_cos_ == -1.0)
      floor_cos_ = node(k + 1);
  }

  floor_angle_ = std::acos(floor_cos_);

  cdf_.resize(n_grid);
  cdf_[0] = 0.0;
  for (int k = 0; k + 1 < n_grid; ++k)
    cdf_[k + 1] = cdf_[k] + 0.5 * step_ * (values_[k] + values_[k + 1]);

  guide_.resize(kGuideSize);
  const double total = cdf_.back();
  int cell = 0;
  for (int j = 0; j < kGuideSize; ++j) {
    const double target = total * j / kGuideSize;
    while (cell < n_grid - 2 && cdf_[cell + 1] <= target)
      ++cell;
    guide_[j] = cell;
  }
}

double PropagatorTable::interpolate(double cos_gamma) const {
  if (!(cos_gamma >= -1.0 && cos_gamma <= 1.0))
    throw DomainError("cos(gamma) outside [-1, 1]");
  return (*this)(cos_gamma);
}

double PropagatorTable::sample_cos(double r) const {
  const double total = cdf_.back();
  const double target = r * total;
  const int n = n_grid();
  int k = guide_[std::min(kGuideSize - 1, static_cast<int>(r * kGuideSize))];
  while (k < n - 2 && cdf_[k + 1] < target)
    ++k;
  const double q = (target - cdf_[k]) / step_;
  const double f0 = values_[k];
  const double a = 0.5 * (values_[k + 1] - values_[k]);
  double t = 2.0 * q / (f0 + std::sqrt(std::max(0.0, f0 * f0 + 4.0 * a * q)));
  t = std::clamp(t, 0.0, 1.0);
  return std::clamp(node(k) + t * step_, -1.0, 1.0);
}

double midpoint_envelope_limit(const PropagatorTable& target, const PropagatorTable& proposal) {
  constexpr double kStep = 0.02;
  constexpr int kPolar = 720;
  constexpr int kAzimuth = 12;
  const double cap = std::min(target.floor_angle(), 0.5 * proposal.floor_angle());
  double limit = 0.0;
  for (double d = kStep; d < cap; d += kStep) {
    const Vec3 l(std::sin(0.5 * d), 0.0, std::cos(0.5 * d));
    const Vec3 r(-l.x(), 0.0, l.z());
    const double bound = target(l.z()) * target(l.z()) / proposal.peak();
    for (int a = 0; a <= kPolar; ++a) {
      const double theta = std::numbers::pi * a / kPolar;
      for (int b = 0; b <= kAzimuth; ++b) {
        const double phi = std::numbers::pi * b / kAzimuth;
        const Vec3 x(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
        if (target(x.dot(l)) * target(x.dot(r)) > bound * proposal(x.z()) * (1.0 + 1e-12))
          return limit;
      }
    }
    limit = d;
  }
  return limit;
}

Vec3 orient_about(const Vec3& axis, double cos_gamma, double phi) {
  const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (helper - helper.dot(axis) * axis).normalized();
  const Vec3 e2 = axis.cross(e1);
  const double s = std::sqrt(std::max(0.0, 1.0 - cos_gamma * cos_gamma));
  return (cos_gamma * axis + s * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

Vec3 PropagatorTable::sample_around(const Vec3& axis, Rng& rng) const {
  const double x = sample_cos(rng.uniform());
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  return orient_about(axis, x, phi);
}

MpeCoefficients mpe_coefficients(std::span<const int> k) {
  if (k.empty())
    throw DomainError("empty MPE step list");
  MpeCoefficients out;
  out.k.assign(k.begin(), k.end());
  // Lagrange form of the Vandermonde solve in the variables 1/k^2.
  for (std::size_t i = 0; i < k.size(); ++i) {
    if (k[i] <= 0)
      throw DomainError("MPE step counts must be positive");
    double c = 1.0;
    const double ki2 = static_cast<double>(k[i]) * k[i];
    for (std::size_t j = 0; j < k.size(); ++j) {
      if (j == i)
        continue;
      const double kj2 = static_cast<double>(k[j]) * k[j];
      if (kj2 == ki2)
        throw DomainError("MPE step counts must be distinct");
      c *= ki2 / (ki2 - kj2);
    }
    out.c.push_back(c);
  }
  return out;
}

const MpeCoefficients& mpe6() {
  static const MpeCoefficients c = [] {
    const std::array<int, 3> k{1, 2, 4};
    return mpe_coefficients(k);
  }();
  return c;
}

SignedLog mpe6_potential_factor(std::span<const double, 5> v, double tau) {
  const auto& c = mpe6().c;
  std::array<double, 3> e{};
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int b = 0; b < 5; ++b)
      s += kMpe6BeadWeights[i][b] * v[b];
    e[i] = -tau * s;
  }
  const double m = *std::max_element(e.begin(), e.end());
  double sum = 0.0;
  for (int i = 0; i < 3; ++i)
    sum += c[i] * std::exp(e[i] - m);
  if (sum == 0.0)
    return {0.0, -std::numeric_limits<double>::infinity()};
  return {sum > 0.0 ? 1.0 : -1.0, m + std::log(std::abs(sum))};
}

double potential_energy(std::span<const Vec3> x, const LatticeSystem& lattice, double u, double g) {
  return total_potential(x, lattice, u, g);
}

double link_weight_primitive(std::span<const Vec3> x, std::span<const Vec3> xp, double tau, const LatticeSystem& lattice,
                             double u, double g) {
  if (x.size() != xp.size())
    throw DomainError("bead size mismatch");
  double w = std::exp(-0.5 * tau * (potential_energy(x, lattice, u, g) + potential_energy(xp, lattice, u, g)));
  for (std::size_t i = 0; i < x.size(); ++i)
    w *= free_rotor_kernel(std::clamp(x[i].dot(xp[i]), -1.0, 1.0), tau);
  return w;
}

double step_weight_mpe6(std::span<const std::vector<Vec3>, 5> beads, double tau, const LatticeSystem& lattice, double u,
                        double g) {
  std::array<double, 5> v{};
  for (int b = 0; b < 5; ++b)
    v[b] = potential_energy(beads[b], lattice, u, g);
  double free = 1.0;
  for (int b = 0; b < 4; ++b) {
    if (beads[b].size() != beads[b + 1].size())
      throw DomainError("bead size mismatch");
    for (std::size_t i = 0; i < beads[b].size(); ++i)
      free *= free_rotor_kernel(std::clamp(beads[b][i].dot(beads[b + 1][i]), -1.0, 1.0), 0.25 * tau);
  }
  const auto f = mpe6_potential_factor(v, tau);
  return free * f.sign * std::exp(f.log_abs);
}

} // namespace dipolar
