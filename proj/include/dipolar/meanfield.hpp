#pragma once

#include <array>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dipolar/lattice.hpp"
#include "dipolar/types.hpp"

namespace dipolar {

/// Index of the real spherical harmonic (l, m) in a basis with l <= l_max.
inline int sh_index(int l, int m) { return l * l + l + m; }
inline int sh_size(int l_max) { return (l_max + 1) * (l_max + 1); }

/// Matrices of n_x, n_y, n_z between real spherical harmonics with l <= l_max.
///
/// Built from the complex (Condon-Shortley) coupling coefficients of cos(theta)
/// and sin(theta) exp(+-i phi), then rotated to the real basis
///   Y_{l,m>0} = sqrt2 (-1)^m Re Y_l^m,  Y_{l,m<0} = sqrt2 (-1)^m Im Y_l^|m|.
std::array<Eigen::MatrixXd, 3> dipole_matrix_elements(int l_max);

struct MeanFieldOptions {
  int l_max = 4;
  double mixing = 1.0;
  int max_iterations = 20000;
  double tolerance = 1e-10;
};

struct MeanFieldState {
  int l_max = 4;
  /// Ground eigenvector of each site's effective Hamiltonian.
  std::vector<Eigen::VectorXd> coefficients;
  std::vector<Vec3> mean_orientation;
  /// Total energy in hB (pair double counting removed).
  double energy = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double mixing = 1.0;
  bool converged = false;
  std::string seed;

  double energy_per_particle() const { return energy / static_cast<double>(mean_orientation.size()); }
};

/// Seed patterns for symmetry breaking.
enum class MeanFieldSeed { unpolarized, polarized, striped };
std::string_view to_string(MeanFieldSeed s);

/// One-site operators shared by every iteration.
class MeanFieldBasis {
public:
  explicit MeanFieldBasis(int l_max);
  int l_max() const { return l_max_; }
  int size() const { return sh_size(l_max_); }
  const Eigen::MatrixXd& n(int axis) const { return n_[axis]; }
  /// (n_a n_b) computed in the l_max + 1 basis and truncated.
  const Eigen::MatrixXd& nn(int a, int b) const { return nn_[3 * a + b]; }
  const Eigen::VectorXd& kinetic() const { return kinetic_; }

private:
  int l_max_;
  std::array<Eigen::MatrixXd, 3> n_;
  std::array<Eigen::MatrixXd, 9> nn_;
  Eigen::VectorXd kinetic_;
};

/// h_eff(i) = L^2 - u n_z + g sum_{j != i} (S_ij <n_j>) . n + (g/2) S_ii : n n,
/// the last term present only when the lattice carries self-image tensors.
Eigen::MatrixXd effective_hamiltonian(int site, std::span<const Vec3> mean_orientation, const LatticeSystem& lattice,
                                      double u, double g, const MeanFieldBasis& basis);

/// Mean-field energy of a product state with the given site coefficients.
double mean_field_energy(std::span<const Eigen::VectorXd> coefficients, const LatticeSystem& lattice, double u, double g,
                         const MeanFieldBasis& basis);

/// Self-consistent field iteration from a seed pattern. Retries with halved
/// mixing when the energy rises or the iteration stalls; throws
/// NumericalError with the final residual if nothing converges.
MeanFieldState scf_solve(const LatticeSystem& lattice, double u, double g, MeanFieldSeed seed,
                         MeanFieldOptions options = {});

/// Lowest-energy solution over the unpolarized, polarized and striped seeds.
MeanFieldState scf_best(const LatticeSystem& lattice, double u, double g, MeanFieldOptions options = {});

struct MeanFieldPoint {
  double g = 0.0;
  double u = 0.0;
  double phi_pol = 0.0;
  double phi_z = 0.0;
  /// Square lattice only (NaN otherwise).
  double phi_xy = 0.0;
  double phi_checkerboard = 0.0;
  double energy_per_particle = 0.0;
  std::string seed;
};

/// Order parameters of a converged state, from the site mean orientations.
MeanFieldPoint mean_field_observables(const MeanFieldState& state, const LatticeSystem& lattice, double g, double u);

std::vector<MeanFieldPoint> mf_phase_scan(const LatticeSystem& lattice, std::span<const double> g_grid,
                                          std::span<const double> u_grid, MeanFieldOptions options = {});

} // namespace dipolar
