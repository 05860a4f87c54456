#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dipolar/lattice.hpp"
#include "dipolar/trial.hpp"
#include "oracles.hpp"

using namespace dipolar;

namespace {

// Langevin function coth(k) - 1/k, with its small-k series.
double langevin(double k) { return std::abs(k) < 1e-4 ? k / 3.0 : 1.0 / std::tanh(k) - 1.0 / k; }

// <T + V> of exp(alpha cos theta) for one rotor: with k = 2 alpha,
// <cos> = L(k) and <sin^2> = 2 L(k) / k, so E = (alpha - u) L(2 alpha).
double closed_form_energy(double alpha, double u) { return (alpha - u) * langevin(2.0 * alpha); }

// Repeated 200-point scans, each zooming onto the best point.
double scan_minimum(double u) {
  double lo = 0.0, hi = 6.0;
  for (int round = 0; round < 8; ++round) {
    double best = lo, best_e = 1e300;
    for (int k = 0; k <= 200; ++k) {
      const double a = lo + (hi - lo) * k / 200.0;
      const double e = closed_form_energy(a, u);
      if (e < best_e) {
        best_e = e;
        best = a;
      }
    }
    const double h = (hi - lo) / 200.0;
    lo = std::max(0.0, best - 2.0 * h);
    hi = best + 2.0 * h;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("trial log values") {
  std::vector<Vec3> x{Vec3(0.3, 0.4, 0.866).normalized(), Vec3(-1, 0, 0), Vec3(0, 0.6, -0.8)};
  CHECK(evaluate_log(TrialWF::hartree(0.0), x) == 0.0);
  CHECK(evaluate_log(TrialWF::constant(), x) == 0.0);
  const std::vector<Vec3> up{Vec3::UnitZ(), Vec3::UnitZ()};
  CHECK(evaluate_log(TrialWF::hartree(1.0), up) == 2.0);
  double direct = 1.0;
  for (const auto& n : x)
    direct *= std::exp(1.7 * n.z());
  CHECK(evaluate_log(TrialWF::hartree(1.7), x) == doctest::Approx(std::log(direct)).epsilon(1e-14));

  const Eigen::AngleAxisd r(0.83, Vec3::UnitZ());
  std::vector<Vec3> rotated;
  for (const auto& n : x)
    rotated.push_back(r * n);
  CHECK(evaluate_log(TrialWF::hartree(1.7), rotated) == doctest::Approx(evaluate_log(TrialWF::hartree(1.7), x)));
}

TEST_CASE("variational energy and optimum") {
  for (double a : {0.0, 0.4, 1.1, 2.5})
    for (double u : {0.0, 1.0, 3.0})
      CHECK(single_rotor_trial_energy(a, u) == doctest::Approx(closed_form_energy(a, u)).epsilon(1e-12));

  CHECK(optimize_alpha(0.0) == 0.0);
  CHECK(std::abs(optimize_alpha(3.0) - scan_minimum(3.0)) < 1e-6);

  for (double u : {0.5, 1.0, 3.0}) {
    const double exact = oracle::single_rotor(u).energy;
    CHECK(single_rotor_trial_energy(optimize_alpha(u), u) >= exact);
  }

  double previous = -1.0;
  for (double u = 0.0; u <= 3.0 + 1e-12; u += 0.5) {
    const double a = optimize_alpha(u);
    CHECK(a >= previous);
    previous = a;
  }
  CHECK(make_trial(TrialKind::constant, 3.0).exponent() == 0.0);
  CHECK(make_trial(TrialKind::hartree, 3.0).exponent() == doctest::Approx(optimize_alpha(3.0)));
}

TEST_CASE("local energy") {
  const auto lat = build_lattice(Geometry::triangular, 12, Convention::periodic_sum);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::vector<Vec3> x(12);
  for (auto& n : x)
    n = Vec3(normal(rng), normal(rng), normal(rng)).normalized();
  CHECK(local_energy(TrialWF::hartree(0.0), x, lat, 0.8, 1.2) == doctest::Approx(total_potential(x, lat, 0.8, 1.2)));
  double kinetic = 0.0;
  for (const auto& n : x)
    kinetic += local_kinetic(1.3, n.z());
  CHECK(local_energy(TrialWF::hartree(1.3), x, lat, 0.8, 1.2) ==
        doctest::Approx(kinetic + total_potential(x, lat, 0.8, 1.2)).epsilon(1e-13));
}

TEST_CASE("analytic Laplacian against finite differences") {
  // L^2 f = -(1/sin) d/dtheta (sin df/dtheta) for an azimuthally symmetric f.
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> angle(0.2, 2.9), alpha(0.1, 3.0);
  const double h = 1e-4;
  for (int i = 0; i < 10; ++i) {
    const double t = angle(rng), a = alpha(rng);
    auto f = [&](double th) { return std::exp(a * std::cos(th)); };
    const double d1 = (f(t + h) - f(t - h)) / (2.0 * h);
    const double d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    const double fd = -(d2 + d1 * std::cos(t) / std::sin(t)) / f(t);
    const double analytic = local_kinetic(a, std::cos(t));
    CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
  }
}

TEST_CASE("optimized trial lowers the local-energy variance") {
  const double u = 3.0;
  auto variance = [&](double a) {
    const oracle::Rule q = oracle::golub_welsch(64);
    double z = 0, m1 = 0, m2 = 0;
    for (std::size_t k = 0; k < q.x.size(); ++k) {
      const double c = q.x[k];
      const double w = q.w[k] * std::exp(2.0 * a * c);
      const double e = local_kinetic(a, c) - u * c;
      z += w;
      m1 += w * e;
      m2 += w * e * e;
    }
    return m2 / z - (m1 / z) * (m1 / z);
  };
  CHECK(variance(optimize_alpha(u)) < variance(0.0));
  CHECK(variance(0.0) == doctest::Approx(3.0));
}
