#include <conelab/asymptotics_fit.hpp>
#include <conelab/disc_operator.hpp>

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace conelab;
using namespace conelab::fit;
using geometry::OuterBoundary;
using geometry::SurfaceOfRevolution;
using geometry::WarpProfile;

namespace {

disc::RadialGrid collar_grid(int n) {
  const auto s = SurfaceOfRevolution::collar(WarpProfile::constant_cone(0.5, 1.0), OuterBoundary::dirichlet);
  return disc::build_grid(s, n);
}

/// Field with mode profiles given as functions of x.
ModalField field(const disc::RadialGrid& g, int k_max, const std::vector<std::function<std::complex<double>(double)>>& modes) {
  ModalField u(g.size(), k_max);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    for (std::size_t j = 0; j < g.size(); ++j) u.at(static_cast<int>(k), j) = modes[k](g.x()[j]);
  }
  return u;
}

mellin::DecayPrediction prediction(double alpha_pred, std::vector<mellin::ModeExponent> modes) {
  mellin::DecayPrediction p{};
  p.alpha_pred = alpha_pred;
  p.mode_exponents = std::move(modes);
  return p;
}

DecayFitReport report_with_mode(int mode, double alpha, Verdict verdict) {
  DecayFitReport r;
  r.modes.push_back({mode, alpha, 0.0, 1.0, std::nullopt, true});
  r.verdict = verdict;
  return r;
}

} // namespace

TEST_CASE("straight-line fit") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{1, 3, 5, 7, 9};
  const auto f = fit_line(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(f.slope_stderr < 1e-12);
  CHECK(f.count == 5);
}

TEST_CASE("tip constant examples") {
  const auto g = collar_grid(256);
  const auto three = field(g, 0, {[](double) { return 3.0; }});
  const auto c3 = extract_tip_constant(three, g.x());
  CHECK(c3.valid);
  CHECK(c3.value == 3.0);

  const auto parabola = field(g, 0, {[](double x) { return 1.0 + x * x; }});
  const auto c1 = extract_tip_constant(parabola, g.x());
  CHECK(c1.valid);
  CHECK(std::abs(c1.value - 1.0) < 1e-6);

  const auto mode1 = field(g, 1, {[](double) { return 0.0; }, [](double x) { return std::pow(x, 2.5); }});
  const auto c0 = extract_tip_constant(mode1, g.x());
  CHECK(c0.value == 0.0);

  // Jagged innermost shells on an otherwise flat profile.
  auto jagged = field(g, 0, {[](double) { return 1.0; }});
  jagged.at(0, 3) = 5.0;
  CHECK_FALSE(extract_tip_constant(jagged, g.x()).valid);

  auto broken = field(g, 0, {[](double) { return 1.0; }});
  broken.at(0, 2) = std::nan("");
  CHECK_FALSE(extract_tip_constant(broken, g.x()).valid);
}

TEST_CASE("synthetic fields give their exponents back") {
  const auto g = collar_grid(512);
  const WindowPolicy policy{};
  for (double alpha : {0.75, 1.25, 2.0, 2.5}) {
    // Radial: c + x^alpha.
    const auto radial = field(g, 0, {[alpha](double x) { return 0.3 + std::pow(x, alpha); }});
    const auto r0 = fit_deviation_exponent(radial, g.x(), 1.0, 0.3, policy, {0});
    CHECK(r0.alpha_dev == doctest::Approx(alpha).epsilon(0.05 / alpha));
    CHECK(r0.modes.at(0).alpha == doctest::Approx(alpha).epsilon(0.05 / alpha));
    CHECK(r0.shells >= 8);

    // Angular: c + x^alpha cos(theta).
    const auto angular =
        field(g, 1, {[](double) { return 0.3; }, [alpha](double x) { return 0.5 * std::pow(x, alpha); }});
    const auto r1 = fit_deviation_exponent(angular, g.x(), 1.0, 0.3, policy, {1});
    CHECK(r1.modes.at(0).mode == 1);
    CHECK(r1.modes.at(0).alpha == doctest::Approx(alpha).epsilon(0.02 / alpha));
    CHECK(r1.alpha_dev == doctest::Approx(alpha).epsilon(0.05 / alpha));
  }
}

TEST_CASE("fit window shifts by one shell barely move the exponent") {
  const auto g = collar_grid(512);
  // Two powers so that the local slope actually varies over the window.
  const auto u = field(g, 0, {[](double x) { return 1.0 + std::pow(x, 2.0) + 0.5 * std::pow(x, 3.0); }});
  const double ratio = g.x()[1] / g.x()[0];
  WindowPolicy base{};
  base.x_lo = 1e-2;
  base.x_hi = 0.1;
  const double a = fit_deviation_exponent(u, g.x(), 1.0, 1.0, base, {0}).alpha_dev;
  for (double s : {ratio, 1.0 / ratio}) {
    WindowPolicy shifted = base;
    shifted.x_lo = *base.x_lo * s;
    shifted.x_hi = *base.x_hi * s;
    CHECK(std::abs(fit_deviation_exponent(u, g.x(), 1.0, 1.0, shifted, {0}).alpha_dev - a) < 0.05);
  }
}

TEST_CASE("verdicts") {
  const auto g = collar_grid(512);
  const auto u = field(g, 1, {[](double x) { return 0.3 + x * x; }, [](double x) { return 0.5 * std::pow(x, 2.5); }});
  const WindowPolicy policy{};
  const auto c0 = extract_tip_constant(u, g.x());

  auto pass = fit_deviation_exponent(u, g.x(), 1.0, c0.value, policy, {0, 1});
  pass.c0_valid = c0.valid;
  CHECK(compare_with_prediction(pass, prediction(2.0, {{0, 2.0, true}, {1, 2.5, true}}), 0.15, policy) == Verdict::pass);
  CHECK(pass.modes.at(1).within_tolerance);

  // Mode-1 oracle far from the fitted slope.
  auto wrong = fit_deviation_exponent(u, g.x(), 1.0, c0.value, policy, {0, 1});
  wrong.c0_valid = true;
  CHECK(compare_with_prediction(wrong, prediction(2.0, {{0, 2.0, true}, {1, 1.25, true}}), 0.15, policy) ==
        Verdict::fail);

  // Slower decay than the guaranteed bound.
  auto slow = fit_deviation_exponent(u, g.x(), 1.0, c0.value, policy, {0});
  slow.c0_valid = true;
  CHECK(compare_with_prediction(slow, prediction(2.5, {{0, 2.0, true}}), 0.15, policy) == Verdict::fail);

  // A constant state has no deviation to fit.
  const auto flat = field(g, 0, {[](double) { return 0.7; }});
  auto none = fit_deviation_exponent(flat, g.x(), 1.0, 0.7, policy, {0});
  none.c0_valid = true;
  CHECK(compare_with_prediction(none, prediction(2.0, {{0, 2.0, true}}), 0.15, policy) == Verdict::inconclusive);

  auto invalid = fit_deviation_exponent(u, g.x(), 1.0, c0.value, policy, {0});
  invalid.c0_valid = false;
  CHECK(compare_with_prediction(invalid, prediction(2.0, {{0, 2.0, true}}), 0.15, policy) == Verdict::inconclusive);
}

TEST_CASE("sweep ordering") {
  const auto good = check_ordering({{0.8, report_with_mode(1, 1.25, Verdict::pass)},
                                    {0.4, report_with_mode(1, 2.5, Verdict::pass)},
                                    {0.6, report_with_mode(1, 1.66, Verdict::pass)}},
                                   1);
  CHECK(good.verdict == Verdict::pass);
  CHECK(good.points.front().rho0 == 0.4);

  const auto flat = check_ordering({{0.4, report_with_mode(1, 1.5, Verdict::pass)},
                                    {0.8, report_with_mode(1, 1.5, Verdict::pass)}},
                                   1);
  CHECK(flat.verdict == Verdict::fail);

  const auto unsure = check_ordering({{0.4, report_with_mode(1, 2.5, Verdict::pass)},
                                      {0.8, report_with_mode(1, 1.25, Verdict::inconclusive)}},
                                     1);
  CHECK(unsure.verdict == Verdict::inconclusive);

  CHECK(check_ordering({{0.4, report_with_mode(1, 2.5, Verdict::pass)}}, 1).verdict == Verdict::inconclusive);
  CHECK(check_ordering({{0.4, report_with_mode(0, 2.0, Verdict::pass)}, {0.8, report_with_mode(0, 2.0, Verdict::pass)}}, 1)
            .verdict == Verdict::inconclusive);
}
