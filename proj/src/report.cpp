#include "dipolar/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dipolar {

void Manifest::add_config(const RunConfig& c) {
  std::istringstream in(to_text(c));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos)
      add("config." + line.substr(0, eq), line.substr(eq + 3));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(manifest_hash(c)));
  add("manifest_hash", buf);
}

void Manifest::add_lattice(const LatticeSystem& lattice) {
  add("lattice.geometry", std::string(to_string(lattice.geometry)));
  add("lattice.convention", std::string(to_string(lattice.convention)));
  add("lattice.n", std::to_string(lattice.size()));
  add("lattice.shape", std::to_string(lattice.shape[0]) + "," + std::to_string(lattice.shape[1]));
  add("lattice.t1", format_number(lattice.t1.x()) + "," + format_number(lattice.t1.y()));
  add("lattice.t2", format_number(lattice.t2.x()) + "," + format_number(lattice.t2.y()));
  add("lattice.r_max", format_number(lattice.r_max));
  add("lattice.images", std::to_string(lattice.image_count));
}

void Manifest::stamp_wall_clock() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  add("wall_clock", buf);
}

Manifest base_manifest(std::string_view table) {
  Manifest m;
  m.add("table", std::string(table));
  m.add("code_version", std::string(kCodeVersion));
  m.add("constants", std::string(kConstantsVersion));
  return m;
}

void write_manifest(std::ostream& out, const Manifest& m) {
  out << "# schema: " << kSchemaVersion << '\n';
  for (const auto& [k, v] : m.entries)
    out << "# " << k << ": " << v << '\n';
}

std::string format_number(double x) {
  if (std::isnan(x))
    return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_estimator_header(std::ostream& out) {
  out << "g,u,N,geometry,tau,beta,method,propagator,"
         "phi_pol,phi_pol_err,phi_z,phi_z_err,phi_xy,phi_xy_err,phi_checkerboard,phi_checkerboard_err,"
         "V_mid,V_mid_err,E_total,E_total_err,samples,flags\n";
}

void write_estimator_row(std::ostream& out, const EstimatorRow& r) {
  auto est = [&](const Estimate& e) { out << format_number(e.value) << ',' << format_number(e.error) << ','; };
  out << format_number(r.g) << ',' << format_number(r.u) << ',' << r.n << ',' << to_string(r.geometry) << ','
      << format_number(r.tau) << ',' << format_number(r.beta) << ',' << r.method << ',' << r.propagator << ',';
  est(r.phi_pol);
  est(r.phi_z);
  est(r.phi_xy);
  est(r.phi_checkerboard);
  est(r.v_mid);
  est(r.e_total);
  out << r.samples << ',' << r.flags << '\n';
}

void write_estimator_csv(std::ostream& out, const Manifest& m, const std::vector<EstimatorRow>& rows) {
  write_manifest(out, m);
  write_estimator_header(out);
  for (const auto& r : rows)
    write_estimator_row(out, r);
}

void write_ordering_csv(std::ostream& out, const Manifest& m, const std::vector<OrderingEnergyRow>& rows) {
  write_manifest(out, m);
  out << "geometry,convention,N,ordering,energy_per_particle\n";
  for (const auto& r : rows)
    out << to_string(r.geometry) << ',' << to_string(r.convention) << ',' << r.n_sites << ',' << r.ordering << ','
        << format_number(r.energy_per_particle) << '\n';
}

QuantumnessRow make_quantumness_row(Geometry geometry, int n, double g, double u, Estimate v_pigs, double v_min,
                                    std::string pattern) {
  QuantumnessRow r;
  r.geometry = geometry;
  r.n = n;
  r.g = g;
  r.u = u;
  r.v_pigs = v_pigs;
  r.v_min = v_min;
  r.min_pattern = std::move(pattern);
  if (v_min == 0.0) {
    r.ratio = {1.0, 0.0};
    r.flag = v_pigs.value == 0.0 ? "zero-over-zero" : "zero-minimum";
  } else {
    r.ratio = {v_pigs.value / v_min, v_pigs.error / std::abs(v_min)};
  }
  return r;
}

void write_quantumness_csv(std::ostream& out, const Manifest& m, const std::vector<QuantumnessRow>& rows) {
  write_manifest(out, m);
  out << "geometry,N,g,u,V_pigs,V_pigs_err,V_min,min_pattern,ratio,ratio_err,flag\n";
  for (const auto& r : rows)
    out << to_string(r.geometry) << ',' << r.n << ',' << format_number(r.g) << ',' << format_number(r.u) << ','
        << format_number(r.v_pigs.value) << ',' << format_number(r.v_pigs.error) << ',' << format_number(r.v_min)
        << ',' << r.min_pattern << ',' << format_number(r.ratio.value) << ',' << format_number(r.ratio.error) << ','
        << r.flag << '\n';
}

std::vector<MoleculeRow> molecule_table() {
  std::vector<MoleculeRow> rows;
  for (const auto& m : reference_molecules())
    rows.push_back({std::string(m.name), m.dipole_debye, m.rotational_constant_ghz,
                    field_for_u(m.dipole_debye, m.rotational_constant_ghz, 1.0),
                    spacing_for_g(m.dipole_debye, m.rotational_constant_ghz, 1.0), m.field_at_u1_kv_per_cm,
                    m.spacing_at_g1_nm});
  return rows;
}

void write_molecule_csv(std::ostream& out, const Manifest& m, const std::vector<MoleculeRow>& rows) {
  write_manifest(out, m);
  out << "molecule,dipole_debye,rotational_constant_ghz,field_kv_per_cm_at_u1,spacing_nm_at_g1,"
         "quoted_field_kv_per_cm,quoted_spacing_nm\n";
  for (const auto& r : rows)
    out << r.name << ',' << format_number(r.dipole_debye) << ',' << format_number(r.rotational_constant_ghz) << ','
        << format_number(r.field_at_u1) << ',' << format_number(r.spacing_at_g1) << ','
        << format_number(r.quoted_field) << ',' << format_number(r.quoted_spacing) << '\n';
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot open output file '" + path + "'");
  out << content;
  if (!out)
    throw IoError("failed writing '" + path + "'");
}

} // namespace dipolar
