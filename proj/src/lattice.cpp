#include "dipolar/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace dipolar {

namespace {

const Vec2 kTriA1{1.0, 0.0};
const Vec2 kTriA2{0.5, std::sqrt(3.0) / 2.0};

int parity(int x) { return ((x % 2) + 2) % 2; }
double sign_of_parity(int x) { return parity(x) == 0 ? 1.0 : -1.0; }

Vec2 primitive(Geometry g, int a, int b) {
  if (g == Geometry::square)
    return Vec2(a, b);
  return a * kTriA1 + b * kTriA2;
}

/// Translation class of a displacement: fractional coordinates modulo 1.
std::pair<long long, long long> class_key(const Eigen::Matrix2d& inv_cell, const Vec2& d) {
  Vec2 f = inv_cell * d;
  constexpr double scale = 1 << 20;
  auto reduce = [](double x) {
    const long long k = std::llround(x * scale);
    const long long m = static_cast<long long>(scale);
    return ((k % m) + m) % m;
  };
  return {reduce(f.x()), reduce(f.y())};
}

void accumulate_dipole(const Vec2& r, double r2, double& xx, double& yy, double& xy, double& zz) {
  const double inv_r = 1.0 / std::sqrt(r2);
  const double inv3 = inv_r * inv_r * inv_r;
  const double inv5 = inv3 / r2;
  xx += inv3 - 3.0 * r.x() * r.x() * inv5;
  yy += inv3 - 3.0 * r.y() * r.y() * inv5;
  xy += -3.0 * r.x() * r.y() * inv5;
  zz += inv3;
}

Mat3 assemble(double xx, double yy, double xy, double zz) {
  Mat3 s = Mat3::Zero();
  s(0, 0) = xx;
  s(1, 1) = yy;
  s(0, 1) = s(1, 0) = xy;
  s(2, 2) = zz;
  return s;
}

// Lattice distances squared are integers (square) or integers (triangular,
// a^2 + ab + b^2), so a relative slack keeps shell membership rotation-safe.
constexpr double kCutoffSlack = 1e-10;

Mat3 nearest_image_tensor(const Vec2& d, const Vec2& t1, const Vec2& t2) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<Vec2> candidates;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j)
      candidates.push_back(d + i * t1 + j * t2);
  for (const auto& c : candidates)
    best = std::min(best, c.squaredNorm());
  if (best < 1e-20)
    throw DomainError("coincident sites");
  Mat3 sum = Mat3::Zero();
  int ties = 0;
  for (const auto& c : candidates) {
    if (c.squaredNorm() <= best * (1.0 + 1e-9)) {
      sum += dipole_tensor(c);
      ++ties;
    }
  }
  return sum / ties;
}

void check_unit(std::span<const Vec3> orientations) {
  for (const auto& n : orientations)
    if (std::abs(n.squaredNorm() - 1.0) > 1e-9)
      throw DomainError("orientation is not a unit vector");
}

double golden_section(const auto& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

} // namespace

std::string_view to_string(Geometry g) { return g == Geometry::triangular ? "triangular" : "square"; }

std::string_view to_string(Convention c) {
  switch (c) {
  case Convention::periodic_sum:
    return "periodic-sum";
  case Convention::minimum_image:
    return "minimum-image";
  case Convention::open:
    return "open";
  }
  return "?";
}

Geometry parse_geometry(std::string_view s) {
  if (s == "triangular")
    return Geometry::triangular;
  if (s == "square")
    return Geometry::square;
  throw ConfigError("unknown geometry '" + std::string(s) + "'");
}

Convention parse_convention(std::string_view s) {
  if (s == "periodic-sum")
    return Convention::periodic_sum;
  if (s == "minimum-image")
    return Convention::minimum_image;
  if (s == "open")
    return Convention::open;
  throw ConfigError("unknown convention '" + std::string(s) + "'");
}

double CutoffPolicy::radius_for(double g) const {
  if (kind == Kind::radius) {
    if (!(value > 0.0))
      throw ConfigError("cutoff radius must be positive");
    return value;
  }
  if (!(value > 0.0))
    throw ConfigError("cutoff tolerance must be positive");
  return std::cbrt(std::max(g, 1.0) / value);
}

std::string CutoffPolicy::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::radius)
    os << "radius:" << value;
  else
    os << "residual:" << value;
  return os.str();
}

int LatticeSystem::side() const {
  if (geometry != Geometry::square)
    throw ConfigError("side() requires a square lattice");
  return shape[0];
}

std::optional<std::array<int, 2>> triangular_shape(int n_sites) {
  std::optional<std::array<int, 2>> best;
  for (int n = 2; n * n <= n_sites; n += 2)
    for (int m = 0; m <= n; m += 2)
      if (n * n + n * m + m * m == n_sites)
        if (!best || m > (*best)[1])
          best = std::array<int, 2>{n, m};
  return best;
}

bool admissible_size(Geometry g, int n_sites) {
  if (n_sites < 1)
    return false;
  if (g == Geometry::triangular)
    return triangular_shape(n_sites).has_value();
  const int l = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_sites))));
  return l * l == n_sites && l >= 2 && l % 2 == 0;
}

std::vector<int> admissible_sizes(Geometry g, int count, int min_size) {
  std::vector<int> out;
  for (int n = std::max(1, min_size); static_cast<int>(out.size()) < count && n < 1000000; ++n)
    if (admissible_size(g, n))
      out.push_back(n);
  return out;
}

std::vector<Vec2> image_vectors(const Vec2& t1, const Vec2& t2, double r_max) {
  const double area = std::abs(t1.x() * t2.y() - t1.y() * t2.x());
  if (!(area > 0.0))
    throw DomainError("degenerate supercell");
  const double diameter = std::max((t1 + t2).norm(), (t1 - t2).norm());
  const double reach = std::max(r_max, 0.0) + diameter;
  const int imax = static_cast<int>(std::ceil(reach * t2.norm() / area)) + 1;
  const int jmax = static_cast<int>(std::ceil(reach * t1.norm() / area)) + 1;
  const double reach2 = reach * reach * (1.0 + kCutoffSlack);
  std::vector<Vec2> out;
  for (int i = -imax; i <= imax; ++i)
    for (int j = -jmax; j <= jmax; ++j) {
      Vec2 v = i * t1 + j * t2;
      if (v.squaredNorm() <= reach2)
        out.push_back(v);
    }
  return out;
}

Mat3 dipole_tensor(const Vec2& r) {
  const double r2 = r.squaredNorm();
  if (r2 < 1e-24)
    throw DomainError("dipole tensor at zero separation");
  double xx = 0, yy = 0, xy = 0, zz = 0;
  accumulate_dipole(r, r2, xx, yy, xy, zz);
  return assemble(xx, yy, xy, zz);
}

Mat3 interaction_tensor(const Vec2& ri, const Vec2& rj, std::span<const Vec2> images, double r_max) {
  const Vec2 d = rj - ri;
  if (d.squaredNorm() < 1e-24)
    throw DomainError("coincident sites");
  const double cut2 = r_max * r_max * (1.0 + kCutoffSlack);
  double xx = 0, yy = 0, xy = 0, zz = 0;
  for (const auto& v : images) {
    const Vec2 r = d + v;
    const double r2 = r.squaredNorm();
    if (r2 > cut2)
      continue;
    if (r2 < 1e-24)
      throw DomainError("sites coincide under a periodic image");
    accumulate_dipole(r, r2, xx, yy, xy, zz);
  }
  return assemble(xx, yy, xy, zz);
}

Mat3 self_image_tensor(std::span<const Vec2> images, double r_max) {
  const double cut2 = r_max * r_max * (1.0 + kCutoffSlack);
  double xx = 0, yy = 0, xy = 0, zz = 0;
  for (const auto& v : images) {
    const double r2 = v.squaredNorm();
    if (r2 < 1e-24 || r2 > cut2)
      continue;
    accumulate_dipole(v, r2, xx, yy, xy, zz);
  }
  return assemble(xx, yy, xy, zz);
}

LatticeSystem build_lattice(Geometry geometry, int n_sites, Convention convention, CutoffPolicy cutoff,
                            double g_scale) {
  if (!admissible_size(geometry, n_sites))
    throw ConfigError("inadmissible size " + std::to_string(n_sites) + " for " + std::string(to_string(geometry)) +
                      " lattice");
  LatticeSystem lat;
  lat.geometry = geometry;
  lat.convention = convention;

  if (geometry == Geometry::square) {
    const int l = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_sites))));
    lat.shape = {l, l};
    lat.t1 = Vec2(l, 0);
    lat.t2 = Vec2(0, l);
    for (int row = 0; row < l; ++row)
      for (int col = 0; col < l; ++col) {
        lat.positions.emplace_back(col, row);
        lat.coords.push_back({col, row});
      }
  } else {
    const auto shape = *triangular_shape(n_sites);
    const int n = shape[0], m = shape[1];
    lat.shape = shape;
    const std::array<int, 2> c1{n, m};
    const std::array<int, 2> c2{-m, n + m};
    lat.t1 = primitive(geometry, c1[0], c1[1]);
    lat.t2 = primitive(geometry, c2[0], c2[1]);
    Eigen::Matrix2d cell;
    cell.col(0) = lat.t1;
    cell.col(1) = lat.t2;
    const Eigen::Matrix2d inv = cell.inverse();
    std::map<std::pair<long long, long long>, std::array<int, 2>> found;
    const int reach = 2 * (n + m) + 2;
    for (int b = -reach; b <= reach; ++b)
      for (int a = -reach; a <= reach; ++a) {
        const Vec2 p = primitive(geometry, a, b);
        const Vec2 f = inv * p;
        const int i = static_cast<int>(std::floor(f.x() + 1e-9));
        const int j = static_cast<int>(std::floor(f.y() + 1e-9));
        const std::array<int, 2> rep{a - i * c1[0] - j * c2[0], b - i * c1[1] - j * c2[1]};
        found.emplace(class_key(inv, p), rep);
      }
    std::vector<std::array<int, 2>> reps;
    for (const auto& [key, rep] : found)
      reps.push_back(rep);
    std::sort(reps.begin(), reps.end(), [](const auto& x, const auto& y) {
      return x[1] != y[1] ? x[1] < y[1] : x[0] < y[0];
    });
    if (static_cast<int>(reps.size()) != n_sites)
      throw NumericalError("triangular supercell enumeration produced the wrong site count");
    for (const auto& r : reps) {
      lat.coords.push_back(r);
      lat.positions.push_back(primitive(geometry, r[0], r[1]));
    }
  }

  const int count = lat.size();
  lat.tensors.assign(static_cast<std::size_t>(count) * count, Mat3::Zero());

  if (convention == Convention::periodic_sum) {
    lat.r_max = cutoff.radius_for(g_scale);
    const auto images = image_vectors(lat.t1, lat.t2, lat.r_max);
    lat.image_count = images.size();
    Eigen::Matrix2d cell;
    cell.col(0) = lat.t1;
    cell.col(1) = lat.t2;
    const Eigen::Matrix2d inv = cell.inverse();
    std::map<std::pair<long long, long long>, Mat3> cache;
    for (int i = 0; i < count; ++i)
      for (int j = i + 1; j < count; ++j) {
        const Vec2 d = lat.positions[j] - lat.positions[i];
        const auto key = class_key(inv, d);
        auto it = cache.find(key);
        if (it == cache.end())
          it = cache.emplace(key, interaction_tensor(lat.positions[i], lat.positions[j], images, lat.r_max)).first;
        lat.tensors[static_cast<std::size_t>(i) * count + j] = it->second;
        lat.tensors[static_cast<std::size_t>(j) * count + i] = it->second;
      }
    const Mat3 self = self_image_tensor(images, lat.r_max);
    for (int i = 0; i < count; ++i)
      lat.tensors[static_cast<std::size_t>(i) * count + i] = self;
  } else if (convention == Convention::minimum_image) {
    lat.image_count = 1;
    for (int i = 0; i < count; ++i)
      for (int j = i + 1; j < count; ++j) {
        const Mat3 s = nearest_image_tensor(lat.positions[j] - lat.positions[i], lat.t1, lat.t2);
        lat.tensors[static_cast<std::size_t>(i) * count + j] = s;
        lat.tensors[static_cast<std::size_t>(j) * count + i] = s;
      }
  } else {
    lat.image_count = 1;
    for (int i = 0; i < count; ++i)
      for (int j = i + 1; j < count; ++j) {
        const Mat3 s = dipole_tensor(lat.positions[j] - lat.positions[i]);
        lat.tensors[static_cast<std::size_t>(i) * count + j] = s;
        lat.tensors[static_cast<std::size_t>(j) * count + i] = s;
      }
  }
  return lat;
}

LatticeSystem build_cluster(std::span<const Vec2> positions) {
  LatticeSystem lat;
  lat.geometry = Geometry::square;
  lat.convention = Convention::open;
  lat.positions.assign(positions.begin(), positions.end());
  for (const auto& p : positions)
    lat.coords.push_back({static_cast<int>(std::lround(p.x())), static_cast<int>(std::lround(p.y()))});
  const int count = lat.size();
  lat.image_count = 1;
  lat.tensors.assign(static_cast<std::size_t>(count) * count, Mat3::Zero());
  for (int i = 0; i < count; ++i)
    for (int j = i + 1; j < count; ++j) {
      const Mat3 s = dipole_tensor(positions[j] - positions[i]);
      lat.tensors[static_cast<std::size_t>(i) * count + j] = s;
      lat.tensors[static_cast<std::size_t>(j) * count + i] = s;
    }
  return lat;
}

std::string OrderingPattern::name() const {
  switch (kind) {
  case Kind::polarized: {
    if (angle == 0.0)
      return "polarized";
    std::ostringstream os;
    os << "polarized@" << angle * 180.0 / std::numbers::pi << "deg";
    return os.str();
  }
  case Kind::striped:
    return "striped-axis" + std::to_string(axis);
  case Kind::checkerboard:
    return "checkerboard";
  case Kind::transverse:
    return "transverse";
  }
  return "?";
}

std::vector<Vec3> assign_orientations(const OrderingPattern& pattern, const LatticeSystem& lattice) {
  std::vector<Vec3> out;
  out.reserve(lattice.size());
  for (int k = 0; k < lattice.size(); ++k) {
    const int a = lattice.coords[k][0];
    const int b = lattice.coords[k][1];
    switch (pattern.kind) {
    case OrderingPattern::Kind::polarized:
      out.emplace_back(std::cos(pattern.angle), std::sin(pattern.angle), 0.0);
      break;
    case OrderingPattern::Kind::transverse:
      out.push_back(field_axis());
      break;
    case OrderingPattern::Kind::checkerboard:
      out.push_back(sign_of_parity(a + b) * field_axis());
      break;
    case OrderingPattern::Kind::striped: {
      Vec2 dir;
      double sign = 1.0;
      if (lattice.geometry == Geometry::square) {
        if (pattern.axis == 0) {
          dir = Vec2(1, 0);
          sign = sign_of_parity(b);
        } else {
          dir = Vec2(0, 1);
          sign = sign_of_parity(a);
        }
      } else {
        switch (pattern.axis) {
        case 0:
          dir = kTriA1;
          sign = sign_of_parity(b);
          break;
        case 1:
          dir = kTriA2;
          sign = sign_of_parity(a);
          break;
        default:
          dir = kTriA2 - kTriA1;
          sign = sign_of_parity(a + b);
          break;
        }
      }
      out.emplace_back(sign * dir.x(), sign * dir.y(), 0.0);
      break;
    }
    }
  }
  return out;
}

std::vector<OrderingPattern> ordering_catalog(Geometry g) {
  if (g == Geometry::triangular)
    return {OrderingPattern::polarized(), OrderingPattern::striped(0), OrderingPattern::striped(1),
            OrderingPattern::striped(2)};
  return {OrderingPattern::polarized(), OrderingPattern::striped(0), OrderingPattern::striped(1),
          OrderingPattern::checkerboard()};
}

double total_potential(std::span<const Vec3> orientations, const LatticeSystem& lattice, double u, double g) {
  const int n = lattice.size();
  if (static_cast<int>(orientations.size()) != n)
    throw DomainError("orientation count does not match lattice size");
  check_unit(orientations);
  const Vec3 e = field_axis();
  double field = 0.0, pair = 0.0, self = 0.0;
  for (int i = 0; i < n; ++i) {
    field += orientations[i].dot(e);
    self += orientations[i].dot(lattice.tensor(i, i) * orientations[i]);
    for (int j = 0; j < i; ++j)
      pair += orientations[i].dot(lattice.tensor(i, j) * orientations[j]);
  }
  return -u * field + g * (pair + 0.5 * self);
}

double classical_energy(std::span<const Vec3> orientations, const LatticeSystem& lattice, double u, double g) {
  return total_potential(orientations, lattice, u, g) / lattice.size();
}

std::vector<OrderingEnergyRow> ordering_energy_report(Geometry geometry, std::span<const OrderingPattern> orderings,
                                                      std::span<const int> sizes, Convention convention,
                                                      CutoffPolicy cutoff) {
  std::vector<OrderingEnergyRow> rows;
  for (int n : sizes) {
    const auto lattice = build_lattice(geometry, n, convention, cutoff, 1.0);
    for (const auto& pattern : orderings) {
      const auto x = assign_orientations(pattern, lattice);
      rows.push_back({geometry, convention, n, pattern.name(), classical_energy(x, lattice, 0.0, 1.0)});
    }
  }
  return rows;
}

ClassicalMinimum classical_minimum(const LatticeSystem& lattice, double u, double g) {
  if (!(g >= 0.0) || !(u >= 0.0))
    throw DomainError("classical_minimum requires g >= 0 and u >= 0");
  const Vec3 e = field_axis();
  ClassicalMinimum best;
  best.energy_per_particle = std::numeric_limits<double>::infinity();

  auto consider = [&](const OrderingPattern& p, double cant, double energy) {
    if (energy < best.energy_per_particle) {
      best.energy_per_particle = energy;
      best.pattern = p;
      best.cant_angle = cant;
    }
  };

  for (const auto& pattern : ordering_catalog(lattice.geometry)) {
    const auto base = assign_orientations(pattern, lattice);
    if (!pattern.in_plane()) {
      consider(pattern, 0.0, classical_energy(base, lattice, u, g));
      continue;
    }
    std::vector<Vec3> x(base.size());
    auto energy_at = [&](double t) {
      for (std::size_t k = 0; k < base.size(); ++k)
        x[k] = (std::cos(t) * base[k] + std::sin(t) * e).normalized();
      return classical_energy(x, lattice, u, g);
    };
    const double half_pi = std::numbers::pi / 2.0;
    consider(pattern, 0.0, energy_at(0.0));
    consider(pattern, half_pi, energy_at(half_pi));
    const double t = golden_section(energy_at, 0.0, half_pi, 1e-6);
    consider(pattern, t, energy_at(t));
  }
  return best;
}

} // namespace dipolar
