#include "dipolar/units.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "dipolar/types.hpp"

namespace dipolar {

namespace {

constexpr double kGHz = 1.0e9;
constexpr double kVoltPerMeterPerKvPerCm = 1.0e5;
constexpr double kNanometre = 1.0e-9;

double rotational_energy(double rotational_constant_ghz) {
  return codata2018::planck * rotational_constant_ghz * kGHz;
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string(what) + " must be strictly positive");
}

constexpr std::array<ReferenceMolecule, 9> kReferenceMolecules{{
    {"KRb", 0.57, 1.10, 3.80, 3.56},
    {"LiCs", 5.46, 6.53, 2.37, 8.83},
    {"NaCs", 4.70, 1.74, 0.73, 12.42},
    {"CsI", 11.69, 0.71, 0.12, 30.70},
    {"KBr", 10.60, 2.43, 0.46, 19.10},
    {"SrO", 8.87, 10.13, 2.27, 10.53},
    {"SrF", 3.47, 7.52, 4.30, 6.22},
    {"YO", 4.54, 11.63, 5.11, 6.42},
    {"YbF", 9.93, 9.19, 1.44, 12.93},
}};

} // namespace

int ReducedParams::links() const {
  if (!(tau > 0.0))
    throw ConfigError("tau must be positive");
  if (!(beta > 0.0))
    throw ConfigError("beta must be positive");
  const double ratio = beta / tau;
  const double m = std::round(ratio);
  if (std::abs(ratio - m) > 1e-9 * ratio || m < 2)
    throw ConfigError("beta must be an integer multiple (>= 2) of tau");
  return static_cast<int>(m);
}

void ReducedParams::validate() const {
  if (!(g >= 0.0))
    throw ConfigError("g must be non-negative");
  if (!(u >= 0.0))
    throw ConfigError("u must be non-negative");
  (void)links();
}

ReducedCouplings reduced_from_physical(const MoleculeParams& m) {
  require_positive(m.dipole_debye, "dipole moment");
  require_positive(m.rotational_constant_ghz, "rotational constant");
  require_positive(m.spacing_nm, "lattice spacing");
  if (!(m.field_kv_per_cm >= 0.0))
    throw DomainError("field strength must be non-negative");

  const double d = m.dipole_debye * codata2018::debye;
  const double hb = rotational_energy(m.rotational_constant_ghz);
  const double field = m.field_kv_per_cm * kVoltPerMeterPerKvPerCm;
  const double r = m.spacing_nm * kNanometre;

  ReducedCouplings out;
  out.u = d * field / hb;
  out.g = d * d / (4.0 * std::numbers::pi * codata2018::vacuum_permittivity * hb * r * r * r);
  return out;
}

double field_for_u(double dipole_debye, double rotational_constant_ghz, double u) {
  require_positive(dipole_debye, "dipole moment");
  require_positive(rotational_constant_ghz, "rotational constant");
  if (!(u >= 0.0))
    throw DomainError("u must be non-negative");
  const double d = dipole_debye * codata2018::debye;
  return u * rotational_energy(rotational_constant_ghz) / d / kVoltPerMeterPerKvPerCm;
}

double spacing_for_g(double dipole_debye, double rotational_constant_ghz, double g) {
  require_positive(dipole_debye, "dipole moment");
  require_positive(rotational_constant_ghz, "rotational constant");
  require_positive(g, "g");
  const double d = dipole_debye * codata2018::debye;
  const double hb = rotational_energy(rotational_constant_ghz);
  const double r3 = d * d / (4.0 * std::numbers::pi * codata2018::vacuum_permittivity * hb * g);
  return std::cbrt(r3) / kNanometre;
}

std::span<const ReferenceMolecule> reference_molecules() { return kReferenceMolecules; }

} // namespace dipolar
