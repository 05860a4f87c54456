// Command-line front end: one subcommand per simulation driver.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical
// failure (including an invalid MPE6 run), 4 file I/O error.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dipolar/config.hpp"
#include "dipolar/drivers.hpp"
#include "dipolar/lattice.hpp"
#include "dipolar/meanfield.hpp"
#include "dipolar/report.hpp"
#include "dipolar/units.hpp"

using namespace dipolar;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::string geometry;
  bool large_size = false;
};

void add_config_options(CLI::App* cmd, ConfigOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "config file (key = value lines)");
  cmd->add_option("-s,--set", o.sets, "override one config key, as key=value (repeatable)");
  cmd->add_option("-G,--geometry", o.geometry, "triangular | square (shortcut for --set geometry=...)");
  cmd->add_flag("--large", o.large_size, "use N = 48 (triangular) / 64 (square) unless n is set");
}

// File settings, then --geometry, then --set in order; later keys replace
// earlier ones.
RunConfig build_config(const ConfigOptions& o) {
  Settings settings;
  if (!o.config_path.empty())
    settings = parse_settings(read_config_text(o.config_path));
  auto put = [&](std::string key, std::string value) {
    auto it = std::find_if(settings.begin(), settings.end(), [&](const auto& kv) { return kv.first == key; });
    if (it == settings.end())
      settings.emplace_back(std::move(key), std::move(value));
    else
      it->second = std::move(value);
  };
  if (!o.geometry.empty())
    put("geometry", o.geometry);
  for (const auto& s : o.sets) {
    const auto one = parse_settings(s);
    if (one.size() != 1)
      throw ConfigError("--set expects key=value, got '" + s + "'");
    put(one.front().first, one.front().second);
  }
  const bool n_given = std::any_of(settings.begin(), settings.end(), [](const auto& kv) { return kv.first == "n"; });
  RunConfig c = config_from_settings(settings);
  if (o.large_size && !n_given)
    c.n = c.geometry == Geometry::triangular ? 48 : 64;
  c.validate();
  return c;
}

void progress_line(const RunConfig& c, const PointResult& r) {
  std::fprintf(stderr, "%s N=%d g=%g u=%g tau=%g beta=%g: bisection", std::string(to_string(c.geometry)).c_str(), c.n,
               c.params.g, c.params.u, c.params.tau, c.params.beta);
  for (const auto& b : r.stats.bisection)
    std::fprintf(stderr, " %.3f", b.rate());
  std::fprintf(stderr, ", end %.3f, rotation %.3f", r.stats.end.rate(), r.stats.rotation.rate());
  if (c.backend == Backend::mpe6)
    std::fprintf(stderr, ", negative weights %.2e", r.stats.negative_fraction());
  std::fprintf(stderr, "\n");
}

void add_move_stats(Manifest& m, const PointResult& r) {
  std::string rates;
  for (const auto& b : r.stats.bisection)
    rates += (rates.empty() ? "" : ",") + format_number(b.rate());
  m.add("moves.bisection_acceptance", rates);
  m.add("moves.end_acceptance", format_number(r.stats.end.rate()));
  m.add("moves.rotation_acceptance", format_number(r.stats.rotation.rate()));
  m.add("moves.negative_weight_fraction", format_number(r.stats.negative_fraction()));
  m.add("moves.bridge_stalls", std::to_string(r.stats.bridge_stalls));
  m.add("moves.trial_alpha", format_number(r.alpha));
}

// Collects rows, reports invalid MPE6 points and returns the exit code.
int finish_scan(const std::vector<PointResult>& points, std::vector<EstimatorRow>& rows) {
  int code = 0;
  for (const auto& p : points) {
    progress_line(p.config, p);
    rows.push_back(make_row(p));
    if (p.backend_invalid) {
      std::fprintf(stderr, "error: negative MPE6 weights above %.1e at g=%g u=%g; backend invalid\n",
                   kNegativeWeightLimit, p.config.params.g, p.config.params.u);
      code = kExitNumerical;
    }
  }
  return code;
}

std::string output_or(const std::string& cli, const RunConfig& c) { return cli.empty() ? c.output_path : cli; }

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-state path-integral and mean-field simulations of dipolar rotors on 2D lattices"};
  app.require_subcommand(1);
  std::string output;
  int threads = 0;
  app.add_option("-o,--output", output, "output CSV (default: stdout or output_path from the config)");
  app.add_option("-j,--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  // lattice-energy
  auto* lattice_cmd = app.add_subcommand("lattice-energy", "classical energy per particle of the ordering catalog");
  std::string le_geometry, le_sizes, le_convention = "periodic-sum", le_cutoff = "residual:1e-08";
  lattice_cmd->add_option("-G,--geometry", le_geometry, "triangular | square")->required();
  lattice_cmd->add_option("-n,--sizes", le_sizes, "comma-separated site counts")->required();
  lattice_cmd->add_option("--convention", le_convention, "periodic-sum | minimum-image | open");
  lattice_cmd->add_option("--cutoff", le_cutoff, "residual:TOL or radius:R");

  // pigs-run
  auto* run_cmd = app.add_subcommand("pigs-run", "one PIGS run; resumable through checkpoint_path");
  ConfigOptions run_opts;
  add_config_options(run_cmd, run_opts);

  // phase-scan
  auto* scan_cmd = app.add_subcommand("phase-scan", "order parameters on a (g, u) grid");
  ConfigOptions scan_opts;
  add_config_options(scan_cmd, scan_opts);
  std::string scan_g = "0:3:0.5", scan_u = "0:3:1", scan_method = "pigs";
  int l_max = MeanFieldOptions{}.l_max;
  scan_cmd->add_option("--g", scan_g, "g grid: a,b,c or start:stop:step");
  scan_cmd->add_option("--u", scan_u, "u grid: a,b,c or start:stop:step");
  scan_cmd->add_option("--method", scan_method, "pigs | meanfield");
  scan_cmd->add_option("--l-max", l_max, "mean-field basis cutoff")->check(CLI::PositiveNumber);

  // convergence-scan
  auto* conv_cmd = app.add_subcommand("convergence-scan", "PIGS runs along tau or beta");
  ConfigOptions conv_opts;
  add_config_options(conv_cmd, conv_opts);
  std::string conv_vary, conv_values;
  conv_cmd->add_option("--vary", conv_vary, "tau | beta")->required();
  conv_cmd->add_option("--values", conv_values, "sorted values: a,b,c or start:stop:step")->required();

  // quantumness
  auto* q_cmd = app.add_subcommand("quantumness", "PIGS <V>/N against the classical minimum");
  ConfigOptions q_opts;
  add_config_options(q_cmd, q_opts);
  std::string q_vary, q_values;
  q_cmd->add_option("--vary", q_vary, "g (at u = 0) | u (at g = 0)")->required();
  q_cmd->add_option("--values", q_values, "a,b,c or start:stop:step")->required();

  // molecule
  auto* mol_cmd = app.add_subcommand("molecule", "laboratory field and spacing for reduced couplings");
  double mol_dipole = 0.0, mol_b = 0.0, mol_u = 1.0, mol_g = 1.0;
  std::string mol_name = "custom";
  auto* dipole_opt = mol_cmd->add_option("--dipole", mol_dipole, "dipole moment (debye)");
  auto* b_opt = mol_cmd->add_option("--rotational-constant", mol_b, "rotational constant B (GHz)");
  dipole_opt->needs(b_opt);
  b_opt->needs(dipole_opt);
  mol_cmd->add_option("--u", mol_u, "reduced field for the field column");
  mol_cmd->add_option("--g", mol_g, "reduced coupling for the spacing column");
  mol_cmd->add_option("--name", mol_name, "label of the custom row");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    std::ostringstream out;
    int code = 0;

    if (*lattice_cmd) {
      const auto geometry = parse_geometry(le_geometry);
      const auto sizes_d = parse_grid(le_sizes);
      std::vector<int> sizes;
      for (double s : sizes_d) {
        if (s != static_cast<int>(s) || s < 1)
          throw ConfigError("sizes must be positive integers");
        sizes.push_back(static_cast<int>(s));
      }
      const auto catalog = ordering_catalog(geometry);
      const auto rows = ordering_energy_report(geometry, catalog, sizes, parse_convention(le_convention),
                                               parse_cutoff(le_cutoff));
      auto m = base_manifest("ordering-energies");
      m.add("cutoff", le_cutoff);
      m.stamp_wall_clock();
      write_ordering_csv(out, m, rows);
    } else if (*run_cmd) {
      const RunConfig c = build_config(run_opts);
      const auto r = run_point(c, threads);
      progress_line(c, r);
      auto m = base_manifest("estimators");
      m.add_config(c);
      m.add_lattice(build_lattice(c.geometry, c.n, c.convention, c.cutoff, c.params.g));
      add_move_stats(m, r);
      m.stamp_wall_clock();
      write_estimator_csv(out, m, {make_row(r)});
      if (r.backend_invalid) {
        std::fprintf(stderr, "error: negative MPE6 weights in %.2e of evaluations (limit %.1e); backend invalid\n",
                     r.stats.negative_fraction(), kNegativeWeightLimit);
        code = kExitNumerical;
      }
      write_output(output_or(output, c), out.str());
      return code;
    } else if (*scan_cmd) {
      const RunConfig base = build_config(scan_opts);
      const auto g_grid = parse_grid(scan_g);
      const auto u_grid = parse_grid(scan_u);
      std::vector<EstimatorRow> rows;
      auto m = base_manifest("estimators");
      m.add_config(base);
      m.add("scan.g", scan_g);
      m.add("scan.u", scan_u);
      m.add("scan.method", scan_method);
      if (scan_method == "meanfield") {
        const double g_max = *std::max_element(g_grid.begin(), g_grid.end());
        const auto lattice = build_lattice(base.geometry, base.n, base.convention, base.cutoff, g_max);
        MeanFieldOptions mf;
        mf.l_max = l_max;
        m.add("meanfield.l_max", std::to_string(l_max));
        m.add_lattice(lattice);
        for (const auto& p : mf_phase_scan(lattice, g_grid, u_grid, mf))
          rows.push_back(make_row(p, lattice));
      } else if (scan_method == "pigs") {
        code = finish_scan(pigs_phase_scan(base, g_grid, u_grid, threads), rows);
      } else {
        throw ConfigError("unknown method '" + scan_method + "' (expected pigs or meanfield)");
      }
      m.stamp_wall_clock();
      write_estimator_csv(out, m, rows);
      write_output(output_or(output, base), out.str());
      return code;
    } else if (*conv_cmd) {
      const RunConfig base = build_config(conv_opts);
      const auto values = parse_grid(conv_values);
      if (!std::is_sorted(values.begin(), values.end()))
        throw ConfigError("convergence values must be sorted");
      std::vector<EstimatorRow> rows;
      code = finish_scan(convergence_scan(base, parse_scan_variable(conv_vary), values, threads), rows);
      auto m = base_manifest("estimators");
      m.add_config(base);
      m.add("scan.vary", conv_vary);
      m.add("scan.values", conv_values);
      m.stamp_wall_clock();
      write_estimator_csv(out, m, rows);
      write_output(output_or(output, base), out.str());
      return code;
    } else if (*q_cmd) {
      const RunConfig base = build_config(q_opts);
      const auto values = parse_grid(q_values);
      const auto rows = quantumness_scan(base, q_vary, values, threads);
      auto m = base_manifest("quantumness");
      m.add_config(base);
      m.add("scan.vary", q_vary);
      m.add("scan.values", q_values);
      m.stamp_wall_clock();
      write_quantumness_csv(out, m, rows);
      write_output(output_or(output, base), out.str());
      return 0;
    } else if (*mol_cmd) {
      std::vector<MoleculeRow> rows;
      if (*dipole_opt) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rows.push_back({mol_name, mol_dipole, mol_b, field_for_u(mol_dipole, mol_b, mol_u),
                        spacing_for_g(mol_dipole, mol_b, mol_g), nan, nan});
      } else {
        rows = molecule_table();
      }
      auto m = base_manifest("molecules");
      m.add("u", format_number(*dipole_opt ? mol_u : 1.0));
      m.add("g", format_number(*dipole_opt ? mol_g : 1.0));
      write_molecule_csv(out, m, rows);
    }
    write_output(output, out.str());
    return code;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}
