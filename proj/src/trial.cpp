#include "dipolar/trial.hpp"

#include <cmath>

#include "dipolar/quadrature.hpp"

namespace dipolar {

std::string_view to_string(TrialKind k) { return k == TrialKind::hartree ? "hartree" : "constant"; }

TrialKind parse_trial(std::string_view s) {
  if (s == "hartree")
    return TrialKind::hartree;
  if (s == "constant")
    return TrialKind::constant;
  throw ConfigError("unknown trial function '" + std::string(s) + "'");
}

TrialWF TrialWF::hartree(double alpha) {
  if (!(alpha >= 0.0))
    throw DomainError("trial exponent must be non-negative");
  return {TrialKind::hartree, alpha};
}

TrialWF make_trial(TrialKind kind, double u) {
  if (kind == TrialKind::constant)
    return TrialWF::constant();
  return TrialWF::hartree(optimize_alpha(u));
}

double evaluate_log(const TrialWF& trial, std::span<const Vec3> x) {
  const double a = trial.exponent();
  if (a == 0.0)
    return 0.0;
  const Vec3 e = field_axis();
  double s = 0.0;
  for (const auto& n : x)
    s += n.dot(e);
  return a * s;
}

double single_rotor_trial_energy(double alpha, double u) {
  static const QuadratureRule rule = gauss_legendre(64);
  double norm = 0.0, energy = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double c = rule.nodes[k];
    // Shifted by the maximum to stay finite for large alpha.
    const double w = rule.weights[k] * std::exp(2.0 * alpha * (c - 1.0));
    norm += w;
    energy += w * (local_kinetic(alpha, c) - u * c);
  }
  return energy / norm;
}

double optimize_alpha(double u) {
  if (!(u >= 0.0))
    throw DomainError("field strength must be non-negative");
  if (u == 0.0)
    return 0.0;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 2.0 * u + 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = single_rotor_trial_energy(c, u), fd = single_rotor_trial_energy(d, u);
  while (b - a > 1e-8) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = single_rotor_trial_energy(c, u);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = single_rotor_trial_energy(d, u);
    }
  }
  return 0.5 * (a + b);
}

double local_energy(const TrialWF& trial, std::span<const Vec3> x, const LatticeSystem& lattice, double u, double g) {
  const double a = trial.exponent();
  const Vec3 e = field_axis();
  double kinetic = 0.0;
  if (a != 0.0)
    for (const auto& n : x)
      kinetic += local_kinetic(a, n.dot(e));
  return kinetic + total_potential(x, lattice, u, g);
}

} // namespace dipolar
