#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dipolar/types.hpp"

namespace dipolar {

enum class Geometry { triangular, square };

/// How periodic images enter the pair tensors.
///  - periodic_sum: every image within the cutoff radius, including the
///    interaction of a rotor with its own images (the diagonal tensor S_ii).
///  - minimum_image: the nearest image only (ties averaged), no self term.
///  - open: the bare positions, no images at all (isolated clusters).
enum class Convention { periodic_sum, minimum_image, open };

std::string_view to_string(Geometry g);
std::string_view to_string(Convention c);
Geometry parse_geometry(std::string_view s);
Convention parse_convention(std::string_view s);

/// Real-space cutoff for periodic sums.
struct CutoffPolicy {
  enum class Kind { residual, radius };
  Kind kind = Kind::residual;
  /// residual: largest tolerated pair coupling g / r_max^3; radius: r_max.
  double value = 1e-8;

  static CutoffPolicy residual(double tolerance = 1e-8) { return {Kind::residual, tolerance}; }
  static CutoffPolicy radius(double r) { return {Kind::radius, r}; }

  /// Cutoff radius for coupling strength g (g below 1 is treated as 1).
  double radius_for(double g) const;
  std::string describe() const;
};

/// Sites of a periodic 2D lattice with precomputed interaction tensors.
///
/// Sites carry integer coordinates (a, b) in the primitive basis: a1 = (1, 0)
/// and a2 = (1/2, sqrt(3)/2) for the triangular lattice, a1 = x, a2 = y for
/// the square one. Square sites are indexed row-major, k = row * L + column,
/// with row = b and column = a. Supercell vectors are multiples of 2 in the
/// primitive basis so that every stripe and checkerboard pattern is
/// commensurate with the box.
struct LatticeSystem {
  Geometry geometry = Geometry::square;
  Convention convention = Convention::open;
  std::vector<Vec2> positions;
  std::vector<std::array<int, 2>> coords;
  Vec2 t1 = Vec2::Zero();
  Vec2 t2 = Vec2::Zero();
  /// Supercell shape (n, m): T1 = n a1 + m a2 (triangular) or (L, L) (square).
  std::array<int, 2> shape{0, 0};
  double r_max = 0.0;
  std::size_t image_count = 0;
  /// Dense N x N tensors, row-major; entry (i, i) is the self-image sum.
  std::vector<Mat3> tensors;

  int size() const { return static_cast<int>(positions.size()); }
  const Mat3& tensor(int i, int j) const { return tensors[static_cast<std::size_t>(i) * positions.size() + j]; }
  /// Side length of a square lattice.
  int side() const;
  /// Row index used by stripe patterns (b coordinate).
  int row(int site) const { return coords[site][1]; }
  int column(int site) const { return coords[site][0]; }
};

/// Supercell shape for a triangular box of N sites: N = n^2 + n m + m^2 with
/// n >= m >= 0 both even, preferring the most hexagonal (largest m) choice.
std::optional<std::array<int, 2>> triangular_shape(int n_sites);
bool admissible_size(Geometry g, int n_sites);
/// Admissible sizes in increasing order, at most `count` of them, >= min_size.
std::vector<int> admissible_sizes(Geometry g, int count, int min_size = 1);

/// All lattice translations i T1 + j T2 with |v| <= r_max + diameter(cell),
/// where the diameter is that of the parallelogram spanned by T1 and T2.
std::vector<Vec2> image_vectors(const Vec2& t1, const Vec2& t2, double r_max);

/// Bare dipolar tensor I/|r|^3 - 3 r r^T / |r|^5 for an in-plane vector.
Mat3 dipole_tensor(const Vec2& r);

/// S_ij = sum over images v with |r_ij + v| <= r_max of dipole_tensor(r_ij + v).
/// Throws DomainError when the sites coincide.
Mat3 interaction_tensor(const Vec2& ri, const Vec2& rj, std::span<const Vec2> images, double r_max);

/// Sum of dipole_tensor(v) over non-zero images with |v| <= r_max.
Mat3 self_image_tensor(std::span<const Vec2> images, double r_max);

/// Builds the supercell and its tensors. `g_scale` enters only through the
/// residual cutoff policy. Throws ConfigError for inadmissible sizes.
LatticeSystem build_lattice(Geometry geometry, int n_sites, Convention convention,
                            CutoffPolicy cutoff = CutoffPolicy::residual(), double g_scale = 1.0);

/// Isolated cluster at explicit positions (open convention, no images).
LatticeSystem build_cluster(std::span<const Vec2> positions);

/// Classical orderings considered in the strong-coupling limit.
struct OrderingPattern {
  enum class Kind { polarized, striped, checkerboard, transverse };
  Kind kind = Kind::polarized;
  /// polarized: in-plane angle from x (radians).
  double angle = 0.0;
  /// striped: lattice axis index (triangular 0..2, square 0 = x, 1 = y).
  int axis = 0;

  static OrderingPattern polarized(double angle = 0.0) { return {Kind::polarized, angle, 0}; }
  static OrderingPattern striped(int axis) { return {Kind::striped, 0.0, axis}; }
  static OrderingPattern checkerboard() { return {Kind::checkerboard, 0.0, 0}; }
  static OrderingPattern transverse() { return {Kind::transverse, 0.0, 0}; }

  bool in_plane() const { return kind == Kind::polarized || kind == Kind::striped; }
  std::string name() const;
};

std::vector<Vec3> assign_orientations(const OrderingPattern& pattern, const LatticeSystem& lattice);

/// Default catalog: polarized along x, one stripe per lattice axis and, on
/// the square lattice, the checkerboard.
std::vector<OrderingPattern> ordering_catalog(Geometry g);

/// Total potential energy in hB:
///   -u sum_i n_i.e + g sum_{j<i} n_i S_ij n_j + (g/2) sum_i n_i S_ii n_i.
/// Throws DomainError if an orientation is not a unit vector.
double total_potential(std::span<const Vec3> orientations, const LatticeSystem& lattice, double u, double g);

/// total_potential / N.
double classical_energy(std::span<const Vec3> orientations, const LatticeSystem& lattice, double u, double g = 1.0);

struct OrderingEnergyRow {
  Geometry geometry;
  Convention convention;
  int n_sites;
  std::string ordering;
  double energy_per_particle;
};

/// Classical E/N at g = 1, u = 0 for each ordering and size.
std::vector<OrderingEnergyRow> ordering_energy_report(Geometry geometry, std::span<const OrderingPattern> orderings,
                                                      std::span<const int> sizes, Convention convention,
                                                      CutoffPolicy cutoff = CutoffPolicy::residual());

struct ClassicalMinimum {
  double energy_per_particle = 0.0;
  OrderingPattern pattern;
  /// Tilt of the in-plane pattern towards the field axis (radians).
  double cant_angle = 0.0;
};

/// Minimum of the classical potential over the ordering catalog, each
/// in-plane pattern canted uniformly towards the field axis.
ClassicalMinimum classical_minimum(const LatticeSystem& lattice, double u, double g);

} // namespace dipolar
