#pragma once

#include <span>
#include <string_view>

namespace dipolar {

// Reduced units used throughout: energies in hB, lengths in lattice spacings
// and imaginary time in (2 pi B)^-1, so the free-rotor kernel decays as
// exp(-tau l(l+1)) and a link carries exp(-tau V) with V in hB.

namespace codata2018 {
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double speed_of_light = 299792458.0;         // m/s
inline constexpr double debye = 1.0e-21 / speed_of_light;     // C m
} // namespace codata2018

inline constexpr std::string_view kConstantsVersion = "CODATA-2018";

/// Dimensionless Hamiltonian parameters and imaginary-time discretisation.
struct ReducedParams {
  double g = 0.0;    // dipole-dipole strength
  double u = 0.0;    // field strength
  double tau = 0.0375;
  double beta = 5.1;

  /// Number of links M = beta / tau. Throws ConfigError unless beta is an
  /// integer multiple (M >= 2) of tau.
  int links() const;
  void validate() const;
};

/// Physical molecule/lattice parameters in laboratory units.
struct MoleculeParams {
  double dipole_debye = 0.0;
  double rotational_constant_ghz = 0.0;
  double field_kv_per_cm = 0.0;
  double spacing_nm = 0.0;
};

struct ReducedCouplings {
  double u = 0.0;
  double g = 0.0;
};

/// u = dE/(hB), g = d^2 / (4 pi eps0 hB r^3). A zero field is allowed and
/// gives u = 0; every other field must be strictly positive.
ReducedCouplings reduced_from_physical(const MoleculeParams& m);

/// Field strength in kV/cm realising a given u.
double field_for_u(double dipole_debye, double rotational_constant_ghz, double u);

/// Lattice spacing in nm realising a given g > 0.
double spacing_for_g(double dipole_debye, double rotational_constant_ghz, double g);

/// Published reference molecules with the field at u = 1 and the spacing
/// at g = 1 as quoted (rounded) in the literature table.
struct ReferenceMolecule {
  std::string_view name;
  double dipole_debye;
  double rotational_constant_ghz;
  double field_at_u1_kv_per_cm;
  double spacing_at_g1_nm;
};

std::span<const ReferenceMolecule> reference_molecules();

} // namespace dipolar
