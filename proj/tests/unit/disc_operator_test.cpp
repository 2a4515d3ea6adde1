#include <conelab/disc_operator.hpp>
#include <conelab/errors.hpp>

#include <doctest.h>

#include "test_util.hpp"

#include <cmath>
#include <numbers>

using namespace conelab;
using namespace conelab::disc;
using geometry::OuterBoundary;
using geometry::SurfaceOfRevolution;
using geometry::WarpProfile;
using std::numbers::pi;

namespace {

SurfaceOfRevolution cone(double rho0, double length = 1.0, OuterBoundary bc = OuterBoundary::dirichlet) {
  return SurfaceOfRevolution::collar(WarpProfile::constant_cone(rho0, length), bc);
}

std::vector<double> sample(const RadialGrid& g, double (*f)(double)) {
  std::vector<double> v(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) v[j] = f(g.x()[j]);
  return v;
}

// Gaussian centred in the collar and its exact cone Laplacian
// u'' + u'/x - k^2 u / (rho0 x)^2.
constexpr double kCentre = 0.5, kWidth2 = 0.04;
double gauss(double x) { return std::exp(-(x - kCentre) * (x - kCentre) / kWidth2); }
double gauss_laplacian(double x, int k, double rho0) {
  const double u = gauss(x);
  const double du = -2.0 * (x - kCentre) / kWidth2 * u;
  const double d2u = (4.0 * (x - kCentre) * (x - kCentre) / (kWidth2 * kWidth2) - 2.0 / kWidth2) * u;
  return d2u + du / x - k * k * u / (rho0 * rho0 * x * x);
}

} // namespace

TEST_CASE("collar grid is log-uniform from x_min") {
  const auto g = build_grid(cone(0.5), 256);
  CHECK(g.size() == 256);
  CHECK(g.x_min() == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(g.x_max() == doctest::Approx(1.0).epsilon(1e-12));
  const double ratio = g.x()[1] / g.x()[0];
  for (std::size_t j = 1; j < g.size(); ++j) {
    CHECK(g.x()[j] > g.x()[j - 1]);
    CHECK(g.x()[j] / g.x()[j - 1] == doctest::Approx(ratio).epsilon(1e-10));
  }
  CHECK(build_grid(cone(0.5, 4.0), 64, {1e-3, true}).x_min() == doctest::Approx(4e-3));
  CHECK(build_grid(cone(0.5, 4.0), 64, {1e-3, false}).x_min() == doctest::Approx(1e-3));
  CHECK_THROWS_AS(build_grid(cone(0.5), 8), PreconditionError);
  CHECK_THROWS_AS(build_grid(cone(0.5), 64, {2.0, true}), PreconditionError);
}

TEST_CASE("grid quadrature integrates low powers") {
  const auto g = build_grid(cone(1.0), 256);
  const double a = g.x_min();
  for (int m = 0; m <= 2; ++m) {
    double sum = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) sum += g.dx_weights()[j] * std::pow(g.x()[j], m);
    const double exact = (1.0 - std::pow(a, m + 1)) / (m + 1);
    CHECK(sum == doctest::Approx(exact).epsilon(1e-8));
  }
  // Mellin measure with rho = 1: int x^2 dx / x.
  const auto w = g.mellin_weights(cone(1.0));
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) sum += w[j] * g.x()[j] * g.x()[j];
  CHECK(sum == doctest::Approx(0.5 * (1.0 - a * a)).epsilon(1e-8));
}

TEST_CASE("closed sphere grid is symmetric under reflection") {
  const auto s = SurfaceOfRevolution::round_sphere(1.0);
  const auto g = build_grid(s, 128);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(g.x()[j] + g.x()[g.size() - 1 - j] == doctest::Approx(pi).epsilon(1e-12));
  }
  for (double x : {0.01, 0.5, 1.5, 3.0}) CHECK(g.x_of(g.sigma_of(x)) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("constants are harmonic") {
  for (const auto& s : {cone(0.4), SurfaceOfRevolution::round_sphere(1.0)}) {
    const auto g = build_grid(s, 128);
    const auto op = assemble_mode_laplacian(g, s, 0);
    const std::vector<double> one(g.size(), 1.0);
    const auto lap = op.apply_laplacian(one);
    for (std::size_t j = 1; j + 1 < g.size(); ++j) {
      const double scale = 1.0 / std::pow(std::min(g.x()[j], g.meridian_length() - g.x()[j]), 2);
      CHECK(std::abs(lap[j]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("zonal harmonic on the sphere") {
  const auto s = SurfaceOfRevolution::round_sphere(1.0);
  double last = 0.0;
  for (int n : {64, 128, 256}) {
    const auto g = build_grid(s, n);
    const auto op = assemble_mode_laplacian(g, s, 0);
    const auto u = sample(g, [](double x) { return std::cos(x); });
    const auto lap = op.apply_laplacian(u);
    double err = 0.0;
    for (std::size_t j = 1; j + 1 < g.size(); ++j) err = std::max(err, std::abs(lap[j] + 2.0 * u[j]));
    CHECK(err < 0.05);
    if (last > 0.0) CHECK(last / err > 8.0);
    last = err;
  }
}

TEST_CASE("interior stencils converge at fourth order") {
  for (int k : {0, 1, 2}) {
    const double rho0 = 0.6;
    std::vector<double> ns, errs;
    for (int n : {64, 128, 256, 512}) {
      const auto s = cone(rho0);
      const auto g = build_grid(s, n);
      const auto op = assemble_mode_laplacian(g, s, k);
      const auto u = sample(g, gauss);
      const auto lap = op.apply_laplacian(u);
      double err = 0.0;
      for (std::size_t j = 1; j + 1 < g.size(); ++j) {
        const double x = g.x()[j];
        if (x < 0.05 || x > 0.95) continue;
        err = std::max(err, std::abs(lap[j] - gauss_laplacian(x, k, rho0)));
      }
      ns.push_back(n);
      errs.push_back(err);
    }
    CHECK(-test::loglog_slope(ns, errs) >= 3.7);
  }
}

TEST_CASE("indicial power is annihilated on a straight cone") {
  const double rho0 = 0.8;
  std::vector<double> ns, errs;
  for (int n : {64, 128, 256, 512}) {
    const auto s = cone(rho0);
    const auto g = build_grid(s, n);
    const auto op = assemble_mode_laplacian(g, s, 1);
    std::vector<double> u(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) u[j] = std::pow(g.x()[j], 1.0 / rho0);
    const auto lap = op.apply_laplacian(u);
    double err = 0.0;
    // Residual relative to the size of one term of the operator.
    for (std::size_t j = 3; j + 3 < g.size(); ++j) err = std::max(err, std::abs(lap[j]) / (u[j] / std::pow(g.x()[j], 2)));
    ns.push_back(n);
    errs.push_back(err);
  }
  CHECK(-test::loglog_slope(ns, errs) >= 3.7);
  CHECK(errs.back() < 1e-6);
}

TEST_CASE("tip closures select the admissible branch") {
  const auto s = cone(0.8);
  const auto g = build_grid(s, 256);
  const double a = g.x_min();

  const auto op0 = build_mode_operator(g, s, 0);
  REQUIRE(op0.tip().has_value());
  CHECK(op0.tip()->kind == ClosureKind::tip_robin);
  CHECK(op0.tip()->mu == 0.0);
  std::vector<double> u(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) u[j] = 1.5 + 0.7 * g.x()[j] * g.x()[j];
  // x d/dx (c + a x^2) = 2 a x^2 at x_min.
  CHECK(std::abs(op0.tip_residual(u)) <= 4.0 * 0.7 * a * a);

  const auto op1 = build_mode_operator(g, s, 1);
  CHECK(op1.tip()->mu == doctest::Approx(1.25));
  std::vector<double> keep(g.size()), drop(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    keep[j] = std::pow(g.x()[j], 1.25);
    drop[j] = std::pow(g.x()[j], -1.25);
  }
  CHECK(std::abs(op1.tip_residual(keep)) / keep[0] < 1e-6);
  CHECK(std::abs(op1.tip_residual(drop)) / drop[0] == doctest::Approx(2.5).epsilon(1e-3));
}

TEST_CASE("outer closures") {
  const auto g = build_grid(cone(0.5, 1.0, OuterBoundary::neumann), 64);
  CHECK(build_mode_operator(g, cone(0.5, 1.0, OuterBoundary::neumann), 0).outer()->kind == ClosureKind::outer_neumann);
  CHECK(build_mode_operator(g, cone(0.5), 0).outer()->kind == ClosureKind::outer_dirichlet);
  const auto sphere = SurfaceOfRevolution::round_sphere(1.0);
  CHECK(build_mode_operator(build_grid(sphere, 64), sphere, 0).outer()->kind == ClosureKind::south_robin);
}

TEST_CASE("minimal extension needs a non-empty window") {
  const auto s = cone(0.5);
  const auto g = build_grid(s, 64);
  const auto empty = mellin::admissible_weights(1, 8, 4, -0.01, mellin::WeightPath::evolution);
  CHECK_THROWS_AS(tip_closure(assemble_mode_laplacian(g, s, 0), Extension::minimal, empty), PreconditionError);
  const auto ok = mellin::admissible_weights(1, 8, 4, -4.0, mellin::WeightPath::evolution);
  const auto op = tip_closure(assemble_mode_laplacian(g, s, 0), Extension::minimal, ok);
  CHECK(op.tip()->kind == ClosureKind::tip_dirichlet);
}

TEST_CASE("interior rows are symmetric in the weighted inner product") {
  for (const auto& s : {cone(0.4), SurfaceOfRevolution::round_sphere(1.0)}) {
    const auto g = build_grid(s, 96);
    for (int k : {0, 3}) {
      const auto op = assemble_mode_laplacian(g, s, k);
      const auto& rows = op.rows();
      const auto m = op.symmetry_weights();
      const auto entry = [&](std::size_t i, std::size_t j) {
        const auto& r = rows[i];
        if (j < r.first || j >= r.first + r.coeffs.size()) return 0.0;
        return r.coeffs[j - r.first];
      };
      const std::size_t n = g.size();
      for (std::size_t i = 3; i + 3 < n; ++i) {
        for (std::size_t j = i; j < std::min(n - 3, i + 3); ++j) {
          const double a = m[i] * entry(i, j), b = m[j] * entry(j, i);
          CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b)) + 1e-300);
        }
      }
    }
  }
}

TEST_CASE("squared operator solve reproduces the tip asymptotics") {
  const double rho0 = 0.4;
  const auto s = cone(rho0);
  const auto g = build_grid(s, 512);
  for (int k : {0, 1}) {
    const auto op = build_mode_operator(g, s, k);
    const NestedSolver solver(op, 0.0, 1.0, 0.0);
    std::vector<double> f(g.size(), 0.0);
    for (std::size_t j = 1; j + 1 < g.size(); ++j) f[j] = gauss(g.x()[j]) * (g.x()[j] > 0.2 ? 1.0 : 0.0);
    const auto u = solver.solve(f);

    // L^2 u = f on rows whose 7-point stencils avoid the closure entries;
    // round-off of two applications grows like x^-4.
    const auto w = op.apply(u);
    const auto l2u = op.apply(w);
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    for (std::size_t j = 4; j + 4 < g.size(); ++j) {
      CHECK(std::abs(l2u[j] - f[j]) * std::pow(g.x()[j], 4) < 1e-7 * (umax + 1.0));
    }

    std::vector<double> xs, ys;
    for (std::size_t j = 2; j < g.size(); ++j) {
      const double x = g.x()[j];
      if (x < 10.0 * g.x_min() || x > 0.05) continue;
      xs.push_back(x);
      ys.push_back(std::abs(k == 0 ? u[j] - u[0] : u[j]));
    }
    const double expected = k == 0 ? 2.0 : k / rho0;
    CHECK(test::loglog_slope(xs, ys) == doctest::Approx(expected).epsilon(0.1 / expected));
  }
}

TEST_CASE("spectrum and smoothing diagnostics") {
  CHECK(smoothing_sup({2.0, 0.0}, 0.5) == doctest::Approx(std::sqrt(0.5 / std::exp(1.0))).epsilon(1e-12));
  CHECK(smoothing_sup({2.0, 0.0}, 0.5) == doctest::Approx(0.4289).epsilon(1e-4));
  CHECK(smoothing_sup({7.0, 0.0}, 0.0) == doctest::Approx(1.0));
  CHECK(smoothing_sup({1.0, 1.0}, 0.5) > smoothing_sup({1.0, 0.0}, 0.5));

  const auto s = cone(0.4, 1.0, OuterBoundary::neumann);
  const auto g = build_grid(s, 128);
  const auto op = build_mode_operator(g, s, 0);
  for (double a : {0.0, 0.25, 0.5, 0.75}) {
    const auto d = spectrum_diagnostics(op, 0.0, a);
    CHECK(d.min_real_part >= 0.0);
    CHECK(d.eigenvalue_count == g.size() - 2);
    CHECK(std::abs(d.smoothing_sup - d.smoothing_expected) < 1e-10);
    if (a > 0.0) CHECK(d.smoothing_expected == doctest::Approx(std::pow(a / std::exp(1.0), a)));
  }
  CHECK(spectrum_diagnostics(op, 0.0, 0.0).smoothing_sup == doctest::Approx(1.0));
}
