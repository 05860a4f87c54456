#pragma once

#include <span>
#include <string_view>

#include "dipolar/lattice.hpp"
#include "dipolar/types.hpp"

namespace dipolar {

enum class TrialKind { hartree, constant };

std::string_view to_string(TrialKind k);
TrialKind parse_trial(std::string_view s);

/// Product trial function prod_i exp(alpha n_i . e).
struct TrialWF {
  TrialKind kind = TrialKind::constant;
  double alpha = 0.0;

  static TrialWF hartree(double alpha);
  static TrialWF constant() { return {}; }
  /// Exponent actually applied (0 for the constant kind).
  double exponent() const { return kind == TrialKind::hartree ? alpha : 0.0; }
};

/// Trial of the requested kind; the Hartree exponent is optimized for a
/// single rotor in field u.
TrialWF make_trial(TrialKind kind, double u);

double evaluate_log(const TrialWF& trial, std::span<const Vec3> x);

/// Variational energy <T + V> of one rotor in exp(alpha cos theta), by
/// 64-point Gauss-Legendre quadrature over cos theta.
double single_rotor_trial_energy(double alpha, double u);

/// argmin over alpha >= 0 of single_rotor_trial_energy (golden section,
/// tolerance 1e-8). Exactly 0 at u = 0.
double optimize_alpha(double u);

/// L^2 exp(a c) / exp(a c) = 2 a c - a^2 (1 - c^2) for c = cos theta.
inline double local_kinetic(double alpha, double c) { return 2.0 * alpha * c - alpha * alpha * (1.0 - c * c); }

/// (H psi_T) / psi_T at X in hB.
double local_energy(const TrialWF& trial, std::span<const Vec3> x, const LatticeSystem& lattice, double u, double g);

} // namespace dipolar
