#pragma once

// Reference computations for the tests, written independently of the
// library (they share only Eigen and the standard special functions).

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Gauss-Legendre nodes and weights by Golub-Welsch (eigenvalues of the
// Jacobi matrix), a different route from the library's Newton iteration.
struct Rule {
  std::vector<double> x, w;
};

inline Rule golub_welsch(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    j(k, k - 1) = j(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Rule r;
  for (int k = 0; k < n; ++k) {
    r.x.push_back(es.eigenvalues()(k));
    r.w.push_back(2.0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k));
  }
  return r;
}

// <l m | cos(theta) | l+1 m> for normalised spherical harmonics.
inline double cos_coupling(int l, int m) {
  return std::sqrt(((l + 1.0) * (l + 1.0) - m * m) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
}

// L^2 - u cos(theta) in the fixed-m sector, l = |m| .. |m| + levels - 1.
inline Eigen::MatrixXd rotor_hamiltonian(double u, int m, int levels) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(levels, levels);
  for (int k = 0; k < levels; ++k) {
    const int l = std::abs(m) + k;
    h(k, k) = l * (l + 1.0);
    if (k + 1 < levels)
      h(k, k + 1) = h(k + 1, k) = -u * cos_coupling(l, m);
  }
  return h;
}

inline Eigen::MatrixXd cos_matrix(int levels) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(levels, levels);
  for (int l = 0; l + 1 < levels; ++l)
    c(l, l + 1) = c(l + 1, l) = cos_coupling(l, 0);
  return c;
}

struct RotorGroundState {
  double energy;
  double cos_mean;
};

// Single rotor in a field: lowest eigenpair of the m = 0 block.
inline RotorGroundState single_rotor(double u, int levels = 25) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rotor_hamiltonian(u, 0, levels));
  const Eigen::VectorXd v = es.eigenvectors().col(0);
  return {es.eigenvalues()(0), v.dot(cos_matrix(levels) * v)};
}

inline Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

// <n | exp(-tau (L^2 - u cos theta)) | n'> summed over m sectors.
inline double exact_rotor_kernel(double theta, double theta_p, double dphi, double u, double tau, int levels = 40,
                                 int m_max = 40) {
  double total = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const Eigen::MatrixXd t = sym_exp(-tau * rotor_hamiltonian(u, m, levels));
    Eigen::VectorXd a(levels), b(levels);
    for (int k = 0; k < levels; ++k) {
      a(k) = std::sph_legendre(m + k, m, theta);
      b(k) = std::sph_legendre(m + k, m, theta_p);
    }
    total += (m == 0 ? 1.0 : 2.0) * std::cos(m * dphi) * a.dot(t * b);
  }
  return total;
}

// Free-rotor kernel by direct Legendre summation with a fixed, generous
// number of terms.
inline double free_kernel_reference(double x, double tau, int terms = 400) {
  double p0 = 1.0, p1 = x, sum = 1.0 + 3.0 * x * std::exp(-2.0 * tau);
  for (int l = 2; l < terms; ++l) {
    const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
    sum += (2.0 * l + 1.0) * p2 * std::exp(-tau * l * (l + 1.0));
    p0 = p1;
    p1 = p2;
  }
  return sum / (4.0 * pi);
}

// Legendre coefficients of exp(alpha cos theta) in the normalised m = 0 basis.
inline Eigen::VectorXd trial_coefficients(double alpha, int levels) {
  const Rule q = golub_welsch(96);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(levels);
  for (std::size_t a = 0; a < q.x.size(); ++a) {
    double p0 = 1.0, p1 = q.x[a];
    for (int l = 0; l < levels; ++l) {
      const double pl = l == 0 ? 1.0 : (l == 1 ? q.x[a] : 0.0);
      double value = pl;
      if (l >= 2) {
        value = ((2.0 * l - 1.0) * q.x[a] * p1 - (l - 1.0) * p0) / l;
        p0 = p1;
        p1 = value;
      }
      psi(l) += 2.0 * pi * q.w[a] * std::exp(alpha * q.x[a]) * std::sqrt((2.0 * l + 1.0) / (4.0 * pi)) * value;
    }
  }
  return psi;
}

enum class Scheme { primitive, mpe6 };

// Deterministic PIGS mixed estimator <H psi| T^K |psi> / <psi| T^K |psi>
// for one rotor in field u, trial exp(alpha cos theta), K = beta / tau
// links, with T the primitive symmetric split or the k = (1, 2, 4)
// multi-product combination of it. Everything in the m = 0 Legendre basis.
inline double mixed_energy(Scheme scheme, double u, double alpha, double tau, double beta, int levels = 60) {
  const Eigen::MatrixXd c = cos_matrix(levels);
  auto primitive = [&](double t) {
    const Eigen::MatrixXd half = sym_exp(0.5 * t * u * c);
    Eigen::VectorXd kin(levels);
    for (int l = 0; l < levels; ++l)
      kin(l) = std::exp(-t * l * (l + 1.0));
    return Eigen::MatrixXd(half * kin.asDiagonal() * half);
  };
  Eigen::MatrixXd t;
  if (scheme == Scheme::primitive) {
    t = primitive(tau);
  } else {
    const int k[3] = {1, 2, 4};
    const double coef[3] = {1.0 / 45.0, -4.0 / 9.0, 64.0 / 45.0};
    t = Eigen::MatrixXd::Zero(levels, levels);
    for (int i = 0; i < 3; ++i) {
      Eigen::MatrixXd p = Eigen::MatrixXd::Identity(levels, levels);
      const Eigen::MatrixXd step = primitive(tau / k[i]);
      for (int r = 0; r < k[i]; ++r)
        p = p * step;
      t += coef[i] * p;
    }
  }
  const Eigen::VectorXd psi = trial_coefficients(alpha, levels);
  const int links = static_cast<int>(std::lround(beta / tau));
  Eigen::VectorXd v = psi;
  for (int s = 0; s < links; ++s) {
    v = t * v;
    v /= v.norm();
  }
  const Eigen::VectorXd hpsi = rotor_hamiltonian(u, 0, levels) * psi;
  return hpsi.dot(v) / psi.dot(v);
}

// Mixed estimator with the exact propagator exp(-beta H).
inline double exact_mixed_energy(double u, double alpha, double beta, int levels = 60) {
  const Eigen::MatrixXd h = rotor_hamiltonian(u, 0, levels);
  const Eigen::VectorXd psi = trial_coefficients(alpha, levels);
  const Eigen::VectorXd v = sym_exp(-beta * h) * psi;
  return (h * psi).dot(v) / psi.dot(v);
}

// Real spherical harmonic with the convention
//   Y_{l,m>0} = sqrt2 (-1)^m Re Y_l^m,  Y_{l,m<0} = sqrt2 (-1)^m Im Y_l^|m|.
inline double real_sh(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double y = std::sph_legendre(l, am, theta);
  const double sign = (am % 2) ? -1.0 : 1.0;
  if (m == 0)
    return y;
  if (m > 0)
    return std::sqrt(2.0) * sign * y * std::cos(am * phi);
  return std::sqrt(2.0) * sign * y * std::sin(am * phi);
}

// <l m| n_axis |l' m'> in the real basis by product quadrature.
inline Eigen::MatrixXd dipole_matrix_by_quadrature(int l_max, int axis) {
  const int size = (l_max + 1) * (l_max + 1);
  const Rule q = golub_welsch(2 * l_max + 4);
  const int n_phi = 4 * l_max + 8;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size, size);
  for (std::size_t a = 0; a < q.x.size(); ++a) {
    const double theta = std::acos(q.x[a]);
    const double s = std::sqrt(1.0 - q.x[a] * q.x[a]);
    for (int b = 0; b < n_phi; ++b) {
      const double phi = 2.0 * pi * b / n_phi;
      const double w = q.w[a] * 2.0 * pi / n_phi;
      const double n[3] = {s * std::cos(phi), s * std::sin(phi), q.x[a]};
      Eigen::VectorXd y(size);
      for (int l = 0; l <= l_max; ++l)
        for (int m = -l; m <= l; ++m)
          y(l * l + l + m) = real_sh(l, m, theta, phi);
      out += w * n[axis] * y * y.transpose();
    }
  }
  return out;
}

// Bare dipole tensor (I - 3 r r^T / r^2) / r^3 for an in-plane vector.
inline Eigen::Matrix3d dipole(double x, double y) {
  const double r2 = x * x + y * y;
  const double r = std::sqrt(r2);
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity() / (r2 * r);
  const double f = 3.0 / (r2 * r2 * r);
  t(0, 0) -= f * x * x;
  t(0, 1) -= f * x * y;
  t(1, 0) -= f * x * y;
  t(1, 1) -= f * y * y;
  return t;
}

// Periodic tensor sum by brute force: every lattice translation i T1 + j T2
// with |d + v| <= r_max, accumulated shell by shell (increasing |i|, |j|)
// with Kahan compensation. `self` drops the v = 0 term of d = 0.
inline Eigen::Matrix3d brute_force_tensor(double dx, double dy, const double t1[2], const double t2[2], double r_max) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero(), comp = Eigen::Matrix3d::Zero();
  const double area = std::abs(t1[0] * t2[1] - t1[1] * t2[0]);
  const double shortest = area / std::max(std::hypot(t1[0], t1[1]), std::hypot(t2[0], t2[1]));
  const int range = static_cast<int>(std::ceil((r_max + std::hypot(dx, dy)) / shortest)) + 2;
  for (int shell = 0; shell <= range; ++shell)
    for (int i = -shell; i <= shell; ++i)
      for (int j = -shell; j <= shell; ++j) {
        if (std::max(std::abs(i), std::abs(j)) != shell)
          continue;
        const double x = dx + i * t1[0] + j * t2[0];
        const double y = dy + i * t1[1] + j * t2[1];
        const double r = std::hypot(x, y);
        if (r > r_max || r < 1e-12)
          continue;
        const Eigen::Matrix3d term = dipole(x, y) - comp;
        const Eigen::Matrix3d next = sum + term;
        comp = (next - sum) - term;
        sum = next;
      }
  return sum;
}

// Gaussian AR(1) process x_t = rho x_{t-1} + sqrt(1 - rho^2) e_t: the
// standard error of the mean of n samples tends to
// sqrt((1 + rho) / ((1 - rho) n)).
inline double ar1_standard_error(double rho, std::size_t n) {
  return std::sqrt((1.0 + rho) / ((1.0 - rho) * static_cast<double>(n)));
}

// Least-squares slope of log|y| against log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double a = std::log(x[k]), b = std::log(std::abs(y[k]));
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracle
