#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dipolar/config.hpp"
#include "dipolar/estimators.hpp"
#include "dipolar/lattice.hpp"
#include "dipolar/units.hpp"

namespace dipolar {

inline constexpr std::string_view kSchemaVersion = "dipolar-estimators v1";
inline constexpr std::string_view kCodeVersion = "1.0.0";

/// Header metadata written as `# key: value` lines above every CSV table.
/// The wall_clock entry is the only field that changes between identical runs.
struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
  void add_config(const RunConfig& c);
  void add_lattice(const LatticeSystem& lattice);
  void stamp_wall_clock();
};

/// Manifest with schema, code and constants versions.
Manifest base_manifest(std::string_view table);

void write_manifest(std::ostream& out, const Manifest& m);

/// One row of the estimator table (PIGS or mean field).
struct EstimatorRow {
  double g = 0.0, u = 0.0;
  int n = 0;
  Geometry geometry = Geometry::triangular;
  double tau = 0.0, beta = 0.0;
  /// "pigs" or "meanfield".
  std::string method = "pigs";
  /// primitive / mpe6 for PIGS, "scf" for mean field.
  std::string propagator = "primitive";
  Estimate phi_pol, phi_z, phi_xy, phi_checkerboard, v_mid, e_total;
  long samples = 0;
  std::string flags;
};

std::string format_number(double x);

void write_estimator_header(std::ostream& out);
void write_estimator_row(std::ostream& out, const EstimatorRow& row);
void write_estimator_csv(std::ostream& out, const Manifest& m, const std::vector<EstimatorRow>& rows);

void write_ordering_csv(std::ostream& out, const Manifest& m, const std::vector<OrderingEnergyRow>& rows);

struct QuantumnessRow {
  Geometry geometry = Geometry::triangular;
  int n = 0;
  double g = 0.0, u = 0.0;
  Estimate v_pigs;
  double v_min = 0.0;
  std::string min_pattern;
  Estimate ratio;
  /// "zero-over-zero" when both energies vanish and the ratio is set to 1.
  std::string flag;
};

/// ratio = <V> / V_min with error from <V>; 0/0 gives 1 with a flag.
QuantumnessRow make_quantumness_row(Geometry geometry, int n, double g, double u, Estimate v_pigs, double v_min,
                                    std::string pattern);
void write_quantumness_csv(std::ostream& out, const Manifest& m, const std::vector<QuantumnessRow>& rows);

struct MoleculeRow {
  std::string name;
  double dipole_debye, rotational_constant_ghz;
  double field_at_u1, spacing_at_g1;
  double quoted_field, quoted_spacing;
};
std::vector<MoleculeRow> molecule_table();
void write_molecule_csv(std::ostream& out, const Manifest& m, const std::vector<MoleculeRow>& rows);

/// Writes to `path`, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& content);

} // namespace dipolar
