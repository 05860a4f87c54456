#include "dipolar/meanfield.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include "dipolar/estimators.hpp"

namespace dipolar {

namespace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

double cos_coupling(int l, int m) {
  // cos(theta) Y_l^m = A(l, m) Y_{l+1}^m + A(l-1, m) Y_{l-1}^m
  if (l < 0)
    return 0.0;
  return std::sqrt(static_cast<double>((l + 1 - m) * (l + 1 + m)) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
}

/// Complex-basis matrices of cos(theta), sin(theta) e^{i phi}, sin(theta) e^{-i phi}.
std::array<ComplexMatrix, 3> complex_dipole(int l_max) {
  const int dim = sh_size(l_max);
  std::array<ComplexMatrix, 3> out;
  for (auto& m : out)
    m = ComplexMatrix::Zero(dim, dim);
  auto add = [&](int which, int lp, int mp, int l, int m, double c) {
    if (lp < 0 || lp > l_max || std::abs(mp) > lp || c == 0.0)
      return;
    out[which](sh_index(lp, mp), sh_index(l, m)) += c;
  };
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m) {
      add(0, l + 1, m, l, m, cos_coupling(l, m));
      if (l >= 1 && std::abs(m) <= l - 1)
        add(0, l - 1, m, l, m, cos_coupling(l - 1, m));
      const double tl = 2.0 * l;
      add(1, l + 1, m + 1, l, m, -std::sqrt((l + m + 1.0) * (l + m + 2.0) / ((tl + 1.0) * (tl + 3.0))));
      if (l >= 1)
        add(1, l - 1, m + 1, l, m, std::sqrt((l - m) * (l - m - 1.0) / ((tl - 1.0) * (tl + 1.0))));
      add(2, l + 1, m - 1, l, m, std::sqrt((l - m + 1.0) * (l - m + 2.0) / ((tl + 1.0) * (tl + 3.0))));
      if (l >= 1)
        add(2, l - 1, m - 1, l, m, -std::sqrt((l + m) * (l + m - 1.0) / ((tl - 1.0) * (tl + 1.0))));
    }
  return out;
}

/// Rows: real harmonics, columns: complex ones.
ComplexMatrix real_transform(int l_max) {
  const int dim = sh_size(l_max);
  ComplexMatrix u = ComplexMatrix::Zero(dim, dim);
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  for (int l = 0; l <= l_max; ++l) {
    u(sh_index(l, 0), sh_index(l, 0)) = 1.0;
    for (int m = 1; m <= l; ++m) {
      const double sign = m % 2 == 0 ? 1.0 : -1.0;
      u(sh_index(l, m), sh_index(l, m)) = sign * r;
      u(sh_index(l, m), sh_index(l, -m)) = r;
      u(sh_index(l, -m), sh_index(l, -m)) = i * r;
      u(sh_index(l, -m), sh_index(l, m)) = -i * sign * r;
    }
  }
  return u;
}

Eigen::MatrixXd to_real(const ComplexMatrix& u, const ComplexMatrix& op) {
  const ComplexMatrix r = u.conjugate() * op * u.transpose();
  if (r.imag().cwiseAbs().maxCoeff() > 1e-12)
    throw NumericalError("real spherical-harmonic transform left an imaginary part");
  return r.real();
}

Vec3 expectation(const Eigen::VectorXd& c, const MeanFieldBasis& basis) {
  return {c.dot(basis.n(0) * c), c.dot(basis.n(1) * c), c.dot(basis.n(2) * c)};
}

Eigen::MatrixXd one_body(int site, const LatticeSystem& lattice, double u, double g, const MeanFieldBasis& basis) {
  Eigen::MatrixXd h = basis.kinetic().asDiagonal();
  h -= u * basis.n(2);
  const Mat3& self = lattice.tensor(site, site);
  if (g != 0.0 && !self.isZero(0.0))
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (self(a, b) != 0.0)
          h += 0.5 * g * self(a, b) * basis.nn(a, b);
  return h;
}

std::vector<Vec3> seed_orientations(const LatticeSystem& lattice, MeanFieldSeed seed) {
  std::vector<Vec3> m(lattice.size(), Vec3::Zero());
  if (seed == MeanFieldSeed::unpolarized)
    return m;
  const auto pattern = seed == MeanFieldSeed::polarized ? OrderingPattern::polarized() : OrderingPattern::striped(0);
  const auto x = assign_orientations(pattern, lattice);
  for (int i = 0; i < lattice.size(); ++i)
    m[i] = 0.5 * x[i];
  return m;
}

} // namespace

std::array<Eigen::MatrixXd, 3> dipole_matrix_elements(int l_max) {
  if (l_max < 1)
    throw DomainError("l_max must be at least 1");
  const auto c = complex_dipole(l_max);
  const auto u = real_transform(l_max);
  const Complex i(0.0, 1.0);
  const ComplexMatrix nx = 0.5 * (c[1] + c[2]);
  const ComplexMatrix ny = (c[1] - c[2]) / (2.0 * i);
  return {to_real(u, nx), to_real(u, ny), to_real(u, c[0])};
}

std::string_view to_string(MeanFieldSeed s) {
  switch (s) {
  case MeanFieldSeed::unpolarized:
    return "unpolarized";
  case MeanFieldSeed::polarized:
    return "polarized";
  case MeanFieldSeed::striped:
    return "striped";
  }
  return "?";
}

MeanFieldBasis::MeanFieldBasis(int l_max) : l_max_(l_max) {
  const auto big = dipole_matrix_elements(l_max + 1);
  const int dim = sh_size(l_max);
  for (int a = 0; a < 3; ++a)
    n_[a] = big[a].topLeftCorner(dim, dim);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      nn_[3 * a + b] = (big[a] * big[b]).topLeftCorner(dim, dim);
  kinetic_.resize(dim);
  for (int l = 0; l <= l_max; ++l)
    for (int m = -l; m <= l; ++m)
      kinetic_[sh_index(l, m)] = l * (l + 1.0);
}

Eigen::MatrixXd effective_hamiltonian(int site, std::span<const Vec3> mean_orientation, const LatticeSystem& lattice,
                                      double u, double g, const MeanFieldBasis& basis) {
  Eigen::MatrixXd h = one_body(site, lattice, u, g, basis);
  if (g != 0.0) {
    Vec3 field = Vec3::Zero();
    for (int j = 0; j < lattice.size(); ++j)
      if (j != site)
        field += lattice.tensor(site, j) * mean_orientation[j];
    for (int a = 0; a < 3; ++a)
      h += g * field[a] * basis.n(a);
  }
  return h;
}

double mean_field_energy(std::span<const Eigen::VectorXd> coefficients, const LatticeSystem& lattice, double u, double g,
                         const MeanFieldBasis& basis) {
  const int n = lattice.size();
  std::vector<Vec3> mean(n);
  double energy = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& c = coefficients[i];
    energy += c.dot(one_body(i, lattice, u, g, basis) * c);
    mean[i] = expectation(c, basis);
  }
  double pair = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      pair += mean[i].dot(lattice.tensor(i, j) * mean[j]);
  return energy + g * pair;
}

MeanFieldState scf_solve(const LatticeSystem& lattice, double u, double g, MeanFieldSeed seed,
                         MeanFieldOptions options) {
  if (!(options.mixing > 0.0 && options.mixing <= 1.0))
    throw DomainError("mixing must lie in (0, 1]");
  const MeanFieldBasis basis(options.l_max);
  const int n = lattice.size();
  double last_residual = std::numeric_limits<double>::infinity();

  for (double mixing = options.mixing; mixing >= 1.0 / 64.0; mixing *= 0.5) {
    std::vector<Vec3> m = seed_orientations(lattice, seed);
    std::vector<Eigen::VectorXd> c(n);
    std::vector<Vec3> fresh(n);
    double previous = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options.max_iterations; ++it) {
      for (int i = 0; i < n; ++i) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(effective_hamiltonian(i, m, lattice, u, g, basis));
        c[i] = eig.eigenvectors().col(0);
        fresh[i] = expectation(c[i], basis);
      }
      double residual = 0.0;
      for (int i = 0; i < n; ++i)
        residual = std::max(residual, (fresh[i] - m[i]).norm());
      last_residual = residual;
      const double energy = mean_field_energy(c, lattice, u, g, basis);
      if (residual < options.tolerance) {
        MeanFieldState s;
        s.l_max = options.l_max;
        s.coefficients = std::move(c);
        s.mean_orientation = std::move(fresh);
        s.energy = energy;
        s.iterations = it;
        s.residual = residual;
        s.mixing = mixing;
        s.converged = true;
        s.seed = std::string(to_string(seed));
        return s;
      }
      if (mixing == 1.0 && energy > previous + 1e-12 * std::max(1.0, std::abs(previous))) {
        break; // undamped iteration went uphill: retry damped
      }
      previous = energy;
      for (int i = 0; i < n; ++i)
        m[i] = (1.0 - mixing) * m[i] + mixing * fresh[i];
    }
  }
  throw NumericalError("mean-field iteration did not converge (residual " + std::to_string(last_residual) + ")");
}

MeanFieldState scf_best(const LatticeSystem& lattice, double u, double g, MeanFieldOptions options) {
  MeanFieldState best;
  bool have = false;
  for (auto seed : {MeanFieldSeed::unpolarized, MeanFieldSeed::polarized, MeanFieldSeed::striped}) {
    auto s = scf_solve(lattice, u, g, seed, options);
    // Ties within roundoff keep the earlier (more symmetric) seed.
    if (!have || s.energy < best.energy - 1e-12 * std::max(1.0, std::abs(best.energy))) {
      best = std::move(s);
      have = true;
    }
  }
  return best;
}

MeanFieldPoint mean_field_observables(const MeanFieldState& state, const LatticeSystem& lattice, double g, double u) {
  MeanFieldPoint p;
  p.g = g;
  p.u = u;
  const double n = lattice.size();
  Vec3 total = Vec3::Zero();
  for (const auto& v : state.mean_orientation)
    total += v;
  total /= n;
  p.phi_pol = std::hypot(total.x(), total.y());
  p.phi_z = total.z();
  if (lattice.geometry == Geometry::square) {
    p.phi_xy = std::hypot(stripe_x(state.mean_orientation, lattice), stripe_y(state.mean_orientation, lattice));
    p.phi_checkerboard = checkerboard(state.mean_orientation, lattice);
  } else {
    p.phi_xy = std::numeric_limits<double>::quiet_NaN();
    p.phi_checkerboard = std::numeric_limits<double>::quiet_NaN();
  }
  p.energy_per_particle = state.energy_per_particle();
  p.seed = state.seed;
  return p;
}

std::vector<MeanFieldPoint> mf_phase_scan(const LatticeSystem& lattice, std::span<const double> g_grid,
                                          std::span<const double> u_grid, MeanFieldOptions options) {
  if (g_grid.empty() || u_grid.empty())
    throw DomainError("empty mean-field scan grid");
  std::vector<MeanFieldPoint> out;
  for (double g : g_grid)
    for (double u : u_grid)
      out.push_back(mean_field_observables(scf_best(lattice, u, g, options), lattice, g, u));
  return out;
}

} // namespace dipolar
