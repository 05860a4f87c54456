#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "dipolar/lattice.hpp"
#include "dipolar/rng.hpp"
#include "dipolar/types.hpp"

namespace dipolar {

/// Short-time propagator used for the path weight.
enum class Backend { primitive, mpe6 };

std::string_view to_string(Backend b);
Backend parse_backend(std::string_view s);

/// Free-rotor imaginary-time kernel
///   G0(x, t) = sum_l (2l+1)/(4 pi) P_l(x) exp(-t l(l+1)),
/// summed until the term bound (2l+1)/(4 pi) exp(-t l(l+1)) drops below 1e-12.
/// Throws DomainError for x outside [-1, 1] or t <= 0.
double free_rotor_kernel(double cos_gamma, double tau_tilde);

/// Highest l retained by free_rotor_kernel at this time step.
int kernel_truncation(double tau_tilde);

/// G0 tabulated on a uniform grid in cos(gamma) with linear interpolation.
///
/// The raw series loses all relative accuracy once the kernel falls below
/// roundoff of its peak (antipodal tail at small t); those entries are
/// clamped to a positive floor and the table is made non-decreasing. The
/// interpolated function is also a sampling density: sample_cos draws from
/// it exactly by inverting the piecewise-quadratic cumulative integral.
class PropagatorTable {
public:
  static constexpr int kDefaultGrid = 1 << 16;

  explicit PropagatorTable(double tau_tilde, int n_grid = kDefaultGrid);

  double tau_tilde() const { return tau_; }
  int n_grid() const { return static_cast<int>(values_.size()); }
  int l_cut() const { return l_cut_; }
  double node(int k) const { return -1.0 + k * step_; }
  std::span<const double> values() const { return values_; }
  double peak() const { return values_.back(); }
  /// Entries replaced by the positive floor.
  int floored() const { return floored_; }
  /// Cosine above which the table holds the unclamped series (-1 if no
  /// entry was floored).
  double floor_cos() const { return floor_cos_; }
  /// Angle at which the floor starts (pi if none).
  double floor_angle() const { return floor_angle_; }

  /// Linear interpolation; throws DomainError outside [-1, 1].
  double interpolate(double cos_gamma) const;
  /// Unchecked interpolation for hot loops; cos_gamma is clamped.
  double operator()(double cos_gamma) const {
    double s = (cos_gamma + 1.0) * inv_step_;
    if (s <= 0.0)
      return values_.front();
    const int last = n_grid() - 1;
    if (s >= last)
      return values_.back();
    const int k = static_cast<int>(s);
    const double t = s - k;
    return values_[k] + t * (values_[k + 1] - values_[k]);
  }

  /// 2 pi times the integral of the interpolant over [-1, 1].
  double norm() const { return 2.0 * 3.14159265358979323846 * cdf_.back(); }

  /// Inverse of the normalised cumulative integral at r in [0, 1).
  double sample_cos(double r) const;
  /// Orientation distributed as interpolate(n . axis) on the sphere.
  Vec3 sample_around(const Vec3& axis, Rng& rng) const;

private:
  double tau_;
  double step_;
  double inv_step_;
  int l_cut_ = 0;
  int floored_ = 0;
  double floor_cos_ = -1.0;
  double floor_angle_ = 3.14159265358979323846;
  std::vector<double> values_;
  std::vector<double> cdf_;
  std::vector<int> guide_;
};

/// Largest endpoint separation d (radians, on a 0.02 grid) for which
///   target(l . x) target(r . x) / proposal(m . x),  m the midpoint of l, r,
/// is maximal at x = m, checked on a polar/azimuthal scan for every grid
/// separation up to d. Then target(l . m)^2 / proposal.peak() bounds the
/// ratio and a midpoint-centred rejection sampler is exact.
double midpoint_envelope_limit(const PropagatorTable& target, const PropagatorTable& proposal);

/// Unit vector obtained from polar cosine x and azimuth phi about `axis`.
Vec3 orient_about(const Vec3& axis, double cos_gamma, double phi);

/// Multi-product extrapolation weights c_i for step counts k_i: the c solve
/// sum_i c_i k_i^(-2j) = delta_{j0} for j = 0 .. n-1.
struct MpeCoefficients {
  std::vector<int> k;
  std::vector<double> c;
};
MpeCoefficients mpe_coefficients(std::span<const int> k);
/// The sixth-order set k = (1, 2, 4).
const MpeCoefficients& mpe6();

/// Weights of the bead potentials inside one MPE6 step, for the terms with
/// k = 1, 2, 4 primitive sub-steps (same order as mpe6().c); multiply by
/// the full step tau.
inline constexpr std::array<std::array<double, 5>, 3> kMpe6BeadWeights{{
    {0.5, 0.0, 0.0, 0.0, 0.5},
    {0.25, 0.0, 0.5, 0.0, 0.25},
    {0.125, 0.25, 0.25, 0.25, 0.125},
}};

/// Potential factor of one MPE6 step, sum_i c_i exp(-tau sum_s w_is V_s),
/// returned as (sign, log|value|) to avoid overflow.
struct SignedLog {
  double sign;
  double log_abs;
};
SignedLog mpe6_potential_factor(std::span<const double, 5> v, double tau);

/// Total potential of one bead, same contract as lattice total_potential.
double potential_energy(std::span<const Vec3> x, const LatticeSystem& lattice, double u, double g);

/// Primitive link e^{-tau V(X)/2} prod_i G0(n_i . n'_i, tau) e^{-tau V(X')/2}
/// with the kernel evaluated by its series.
double link_weight_primitive(std::span<const Vec3> x, std::span<const Vec3> xp, double tau, const LatticeSystem& lattice,
                             double u, double g);

/// MPE6 weight of five beads at offsets 0, tau/4, .., tau:
/// prod over the four tau/4 links of prod_i G0 times mpe6_potential_factor.
/// May be negative.
double step_weight_mpe6(std::span<const std::vector<Vec3>, 5> beads, double tau, const LatticeSystem& lattice, double u,
                        double g);

} // namespace dipolar
