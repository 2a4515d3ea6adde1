#include <conelab/errors.hpp>
#include <conelab/geometry.hpp>

#include <doctest.h>
#include <Eigen/Dense>

#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace conelab;
using namespace conelab::geometry;
using std::numbers::pi;

namespace {

// x d/dx log rho by centered differences.
double h_by_differences(const WarpProfile& p, double x) {
  const double step = 1e-6 * x;
  return x * (std::log(p.rho(x + step)) - std::log(p.rho(x - step))) / (2.0 * step);
}

// Eigenvalues of the Fourier-spectral second derivative on M (odd) equispaced
// points of a circle of radius r, sorted descending.
std::vector<double> circle_laplacian_eigenvalues(double r, int m) {
  Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      double v = 0.0;
      for (int k = 1; k <= (m - 1) / 2; ++k) v -= 2.0 * k * k * std::cos(2.0 * pi * k * (i - j) / m);
      d2(i, j) = v / (m * r * r);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d2);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + m);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

} // namespace

TEST_CASE("constant cone has flat H") {
  const auto p = WarpProfile::constant_cone(0.4, 1.0);
  for (double x : {1e-6, 0.1, 0.5, 0.999}) {
    const auto c = eval_metric_coeffs(p, x);
    CHECK(c.rho == 0.4);
    CHECK(c.h == 0.0);
  }
}

TEST_CASE("round sphere coefficients") {
  const auto p = WarpProfile::round_sphere(1.0, 1.5);
  const auto c = eval_metric_coeffs(p, 0.5);
  CHECK(c.rho == doctest::Approx(std::sin(0.5) / 0.5).epsilon(1e-14));
  const double h_exact = 0.5 / std::tan(0.5) - 1.0;
  CHECK(c.h == doctest::Approx(h_exact).epsilon(1e-12));
  CHECK(std::abs(h_by_differences(p, 0.5) - h_exact) < 1e-8);

  CHECK(p.tip_rho() == 1.0);
  for (double x : {1e-2, 1e-3, 1e-4}) {
    const double h = eval_metric_coeffs(p, x).h;
    CHECK(h < 0.0);
    CHECK(h == doctest::Approx(-x * x / 3.0).epsilon(x * x));
  }
  CHECK(WarpProfile::round_sphere(2.0, 1.0).tip_rho() == 1.0);
}

TEST_CASE("cone angle from the circumference of small circles") {
  const auto p = WarpProfile::constant_cone(0.5, 1.0);
  // Circle {x fixed} has length int_0^{2 pi} x rho(x) dtheta; trapezoid in theta.
  const int m = 64;
  const double x = 1e-4;
  double length = 0.0;
  for (int l = 0; l < m; ++l) length += p.radius(x) * (2.0 * pi / m);
  CHECK(length / x == doctest::Approx(pi).epsilon(1e-12));
}

TEST_CASE("teardrop profile") {
  const auto p = WarpProfile::teardrop(0.4, 1.0, 0.9);
  CHECK(p.tip_rho() == doctest::Approx(0.4));
  CHECK(p.rho(1.0) == doctest::Approx(0.9));
  CHECK(p.drho(0.0) == doctest::Approx(0.0));
  CHECK(p.drho(1.0) == doctest::Approx(0.0));
  double last = p.rho(0.0);
  for (int i = 1; i <= 100; ++i) {
    const double r = p.rho(i / 100.0);
    CHECK(r >= last);
    last = r;
  }
}

TEST_CASE("tabulated profile follows a smooth table") {
  std::vector<double> xs, rs;
  for (int i = 0; i <= 40; ++i) {
    const double x = i * 0.025;
    xs.push_back(x);
    rs.push_back(x == 0.0 ? 1.0 : std::sin(x) / x);
  }
  const auto p = WarpProfile::tabulated(xs, rs);
  CHECK(p.collar_length() == doctest::Approx(1.0));
  for (double x : {0.0, 0.013, 0.31, 0.77}) {
    const double exact = x == 0.0 ? 1.0 : std::sin(x) / x;
    CHECK(std::abs(p.rho(x) - exact) < 1e-6);
  }
  CHECK_THROWS_AS(WarpProfile::tabulated({0.0, 0.2, 0.1, 0.3}, {1, 1, 1, 1}), ConstructionError);
  CHECK_THROWS_AS(WarpProfile::tabulated({0.1, 0.2, 0.3, 0.4}, {1, 1, 1, 1}), ConstructionError);
  CHECK_THROWS_AS(WarpProfile::tabulated({0.0, 0.1, 0.2, 0.3}, {1, -1, 1, 1}), ConstructionError);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(WarpProfile::constant_cone(0.0, 1.0), ConstructionError);
  CHECK_THROWS_AS(WarpProfile::constant_cone(0.5, -1.0), ConstructionError);
  CHECK_THROWS_AS(WarpProfile::round_sphere(-1.0, 1.0), ConstructionError);
  CHECK_THROWS_AS(WarpProfile::round_sphere(1.0, 4.0), ConstructionError);
  CHECK_THROWS_AS(profile_kind_from_string("cylinder"), ConstructionError);
}

TEST_CASE("evaluation outside the collar is a domain error") {
  const auto p = WarpProfile::constant_cone(0.4, 1.0);
  CHECK_THROWS_AS(eval_metric_coeffs(p, -0.1), DomainError);
  CHECK_THROWS_AS(eval_metric_coeffs(p, 1.0), DomainError);
  CHECK_THROWS_AS(eval_metric_coeffs(p, 2.0), DomainError);
}

TEST_CASE("H matches differences of log rho for every profile kind") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  const std::vector<WarpProfile> profiles{
      WarpProfile::constant_cone(0.3, 1.0),     WarpProfile::round_sphere(1.0, 1.0),
      WarpProfile::round_sphere(3.0, 1.0),      WarpProfile::spheroid(1.0, 0.6, 1.0),
      WarpProfile::spheroid(0.7, 1.4, 1.0),     WarpProfile::teardrop(0.4, 1.0),
      WarpProfile::teardrop(0.2, 1.0, 0.6),
  };
  for (const auto& p : profiles) {
    for (int i = 0; i < 50; ++i) {
      const double x = unit(rng) * p.collar_length();
      const double h = eval_metric_coeffs(p, x).h;
      CHECK(std::abs(h - h_by_differences(p, x)) <= 1e-6 * std::max(std::abs(h), 1e-3));
    }
  }
}

TEST_CASE("circle spectrum") {
  const auto s = cross_section_spectrum(WarpProfile::constant_cone(0.5, 1.0), 1, 2);
  const std::vector<double> expected{0, -4, -4, -16, -16};
  REQUIRE(s.eigenvalues().size() == expected.size());
  const auto oracle = circle_laplacian_eigenvalues(0.5, 9);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(s.eigenvalues()[i] == doctest::Approx(expected[i]).epsilon(1e-14));
    CHECK(s.eigenvalues()[i] == doctest::Approx(oracle[i]).epsilon(1e-10));
  }
  CHECK(*s.lambda1() == -4.0);

  const auto smooth = cross_section_spectrum(WarpProfile::round_sphere(1.0, 1.0), 1, 1);
  CHECK(*smooth.lambda1() == doctest::Approx(-1.0));
  CHECK(circle_laplacian_eigenvalues(1.0, 5)[1] == doctest::Approx(-1.0));

  const auto constants = cross_section_spectrum(WarpProfile::constant_cone(0.7, 1.0), 1, 0);
  CHECK(constants.eigenvalues() == std::vector<double>{0.0});
  CHECK_FALSE(constants.lambda1().has_value());

  CHECK_THROWS_AS(cross_section_spectrum(WarpProfile::constant_cone(0.5, 1.0), 2, 3), UnsupportedError);
}

TEST_CASE("large curvature threshold of the circle spectrum sits at rho0 = 1/2") {
  for (double rho0 : {0.1, 0.3, 0.49, 0.5, 0.5 + 1e-9, 0.6, 1.0, 2.0}) {
    const auto s = CrossSectionSpectrum::circle(rho0, 1);
    CHECK(*s.lambda1() == doctest::Approx(-1.0 / (rho0 * rho0)));
    CHECK((-*s.lambda1() >= 4.0) == (rho0 <= 0.5));
  }
}

TEST_CASE("spectrum tables") {
  const auto s = CrossSectionSpectrum::from_table(3, {-8, 0, -3, -3, -3});
  CHECK(s.dimension() == 3);
  CHECK(*s.lambda1() == -3.0);
  CHECK(s.eigenvalues() == std::vector<double>{0, -3, -3, -3, -8});
  CHECK_THROWS_AS(CrossSectionSpectrum::from_table(2, {-1, -2}), InvalidSpectrumError);
  CHECK_THROWS_AS(CrossSectionSpectrum::from_table(2, {0, 0, -2}), InvalidSpectrumError);
  CHECK_THROWS_AS(CrossSectionSpectrum::from_table(2, {0, 1}), InvalidSpectrumError);
}

TEST_CASE("surfaces of revolution") {
  const auto sphere = SurfaceOfRevolution::round_sphere(1.0);
  CHECK(sphere.topology() == Topology::closed);
  CHECK(sphere.meridian_length() == doctest::Approx(pi));
  for (double x : {0.1, 0.7, 1.3, 2.0, 3.0}) {
    CHECK(sphere.radius(x) == doctest::Approx(std::sin(x)).epsilon(1e-10));
    CHECK(sphere.radius(x) == doctest::Approx(sphere.radius(pi - x)).epsilon(1e-10));
  }
  const auto collar = SurfaceOfRevolution::collar(WarpProfile::constant_cone(0.4, 2.0), OuterBoundary::dirichlet);
  CHECK(collar.topology() == Topology::collar);
  CHECK(collar.meridian_length() == 2.0);
  CHECK(collar.outer_boundary() == OuterBoundary::dirichlet);
  CHECK(collar.radius(1.0) == doctest::Approx(0.4));
  CHECK_FALSE(collar.south().has_value());
}
