#include <conelab/errors.hpp>
#include <conelab/integrator.hpp>
#include <conelab/mms.hpp>

#include <doctest.h>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <memory>
#include <numbers>

using namespace conelab;
using namespace conelab::dyn;
using geometry::OuterBoundary;
using geometry::SurfaceOfRevolution;
using geometry::WarpProfile;
using std::numbers::pi;

namespace {

SurfaceOfRevolution neumann_cone(double rho0) {
  return SurfaceOfRevolution::collar(WarpProfile::constant_cone(rho0, 1.0), OuterBoundary::neumann);
}

SolverConfig config(double dt, double t_final, Scheme scheme = Scheme::imex_bdf2) {
  SolverConfig cfg;
  cfg.dt = dt;
  cfg.t_final = t_final;
  cfg.scheme = scheme;
  return cfg;
}

ModalField constant_field(std::size_t n, int k_max, double c) {
  ModalField u(n, k_max);
  for (std::size_t j = 0; j < n; ++j) u.at(0, j) = c;
  return u;
}

// Integral of the mode-0 profile over a closed surface (2 pi int u R dx).
double mean_integral(const disc::RadialGrid& g, const SurfaceOfRevolution& s, const ModalField& u) {
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) sum += g.dx_weights()[j] * s.radius(g.x()[j]) * u.at(0, j).real();
  return 2.0 * pi * sum;
}

} // namespace

TEST_CASE("coefficients and Lipschitz spot checks") {
  const auto c = Coefficient::table({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}, 2.0);
  CHECK(c(-1.0) == 0.0);
  CHECK(c(0.5) == doctest::Approx(1.0));
  CHECK(c(1.5) == doctest::Approx(1.5));
  CHECK(c(5.0) == 1.0);
  CHECK(c.max_abs() == 2.0);
  CHECK_THROWS_AS(Coefficient::table({1.0, 0.0}, {0.0, 1.0}, 1.0), ConstructionError);
  CHECK_THROWS_AS(Coefficient::table({0.0, 1.0}, {0.0}, 1.0), ConstructionError);

  CHECK(Nonlinearity({Coefficient::constant(1.0), c}).check_lipschitz(2.0, 1));
  const auto too_tight = Coefficient::table({0.0, 1.0, 2.0}, {0.0, 2.0, 1.0}, 0.5);
  CHECK_FALSE(Nonlinearity({Coefficient::constant(0.0), too_tight}).check_lipschitz(2.0, 1));

  const auto sh = Nonlinearity::constant({0, 1, 0, -1});
  CHECK(sh.degree() == 3);
  CHECK(sh(0.0, 0.5) == doctest::Approx(0.375));
  CHECK(Nonlinearity::constant({0, 0, 0}).is_zero());
  CHECK(Nonlinearity::constant({0, 0, 0}).degree() == 0);
}

TEST_CASE("nonlinearity on the angular grid") {
  const auto s = neumann_cone(0.5);
  const auto g = disc::build_grid(s, 32);

  const Integrator sh(g, s, 2, Nonlinearity::constant({0, 1, 0, -1}), config(1e-3, 1.0));
  const auto f = sh.evaluate_F(constant_field(g.size(), 2, 0.5), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(f.at(0, j).real() == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(std::abs(f.at(1, j)) < 1e-15);
    CHECK(std::abs(f.at(2, j)) < 1e-15);
  }

  const Integrator zero(g, s, 2, Nonlinearity::constant({0, 0, 0}), config(1e-3, 1.0));
  CHECK(zero.evaluate_F(constant_field(g.size(), 2, 0.7), 0.0).max_abs() == 0.0);

  // cos^2 theta = 1/2 + cos(2 theta)/2.
  const Integrator square(g, s, 2, Nonlinearity::constant({0, 0, 1}), config(1e-3, 1.0));
  ModalField u(g.size(), 2);
  for (std::size_t j = 0; j < g.size(); ++j) u.at(1, j) = 0.5;
  const auto f2 = square.evaluate_F(u, 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    CHECK(std::abs(f2.at(0, j) - 0.5) < 1e-14);
    CHECK(std::abs(f2.at(1, j)) < 1e-14);
    CHECK(std::abs(f2.at(2, j) - 0.25) < 1e-14);
  }
}

TEST_CASE("dealiased angular resolution") {
  CHECK(dealiased_theta_points(0, 3) >= 2);
  for (int k = 1; k <= 8; ++k) {
    for (int m = 1; m <= 5; ++m) {
      const auto pts = dealiased_theta_points(k, m);
      CHECK(pts % 2 == 0);
      CHECK(pts >= static_cast<std::size_t>(2 * k + 2));
      CHECK(2 * pts >= static_cast<std::size_t>((m + 1) * (2 * k + 1)));
    }
  }
}

TEST_CASE("constant data stays constant under one Euler step") {
  for (const auto& s : {neumann_cone(0.4), SurfaceOfRevolution::round_sphere(1.0)}) {
    const auto g = disc::build_grid(s, 128);
    for (double dt : {1e-2, 5e-3}) {
      const Integrator it(g, s, 1, Nonlinearity::constant({0, 1, 0, -1}), config(dt, 1.0, Scheme::imex_euler));
      auto state = it.initialize(constant_field(g.size(), 1, 0.5));
      it.step(state);
      // (1 + dt) u1 = u0 + dt (u0 - u0^3).
      const double discrete = (0.5 + dt * (0.5 - 0.125)) / (1.0 + dt);
      // u' = u - u^3 - u = -u^3 from 0.5: u = 1 / sqrt(4 + 2 t).
      const double exact = 1.0 / std::sqrt(4.0 + 2.0 * dt);
      for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(state.u.at(0, j).real() == doctest::Approx(discrete).epsilon(1e-12));
        CHECK(std::abs(state.u.at(1, j)) < 1e-14);
      }
      CHECK(std::abs(discrete - exact) < dt * dt);
    }
  }
}

TEST_CASE("zero time step is the identity") {
  const auto s = neumann_cone(0.5);
  const auto g = disc::build_grid(s, 64);
  const Integrator it(g, s, 1, Nonlinearity::constant({0, 1, 0, -1}), config(0.0, 1.0));
  ModalField u0(g.size(), 1);
  for (std::size_t j = 0; j < g.size(); ++j) {
    u0.at(0, j) = std::cos(g.x()[j]);
    u0.at(1, j) = {0.1 * g.x()[j], 0.2};
  }
  auto state = it.initialize(u0);
  it.step(state);
  CHECK(state.u.data() == u0.data());
  CHECK(state.t == 0.0);
  CHECK_THROWS_AS(it.run(state), PreconditionError);
}

TEST_CASE("one BDF2 step decays an eigenvector at the exact rate") {
  const auto s = SurfaceOfRevolution::collar(WarpProfile::constant_cone(0.5, 1.0), OuterBoundary::dirichlet);
  const auto g = disc::build_grid(s, 48);
  const auto op = disc::build_mode_operator(g, s, 0);
  const std::size_t m = g.size() - 2;
  const auto dense = op.interior_matrix();
  Eigen::MatrixXd a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = dense[i * m + j];
  Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  // Eigenvalue of L = Delta + 1 closest to zero gives the slowest mode.
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(best))) best = i;
  const double lam = es.eigenvalues()(best).real();
  REQUIRE(std::abs(es.eigenvalues()(best).imag()) < 1e-10);
  const double mu = lam * lam;
  std::vector<double> interior(m);
  for (std::size_t i = 0; i < m; ++i) interior[i] = es.eigenvectors()(static_cast<Eigen::Index>(i), best).real();
  const auto [b0, b1] = op.boundary_values(interior);
  ModalField v(g.size(), 0);
  v.at(0, 0) = b0;
  v.at(0, g.size() - 1) = b1;
  for (std::size_t i = 0; i < m; ++i) v.at(0, i + 1) = interior[i];

  std::vector<double> errs;
  for (double dt : {0.2 / mu, 0.1 / mu}) {
    const Integrator it(g, s, 0, Nonlinearity::constant({0}), config(dt, 1.0));
    auto state = it.initialize(v);
    // Exact previous level, so the step below is a genuine two-level BDF2 step.
    state.u_prev = v;
    state.u_prev *= std::exp(mu * dt);
    state.f_prev = ModalField(g.size(), 0);
    state.has_prev = true;
    it.step(state);
    double err = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j)
      err = std::max(err, std::abs(state.u.at(0, j).real() - std::exp(-mu * dt) * v.at(0, j).real()));
    errs.push_back(err / v.max_abs());
  }
  CHECK(errs[0] < 0.01);
  CHECK(errs[0] / errs[1] == doctest::Approx(8.0).epsilon(0.2));
}

TEST_CASE("mode zero stays real and runs are deterministic") {
  const auto s = neumann_cone(0.5);
  const auto g = disc::build_grid(s, 96);
  const Integrator it(g, s, 3, Nonlinearity::constant({0.1, 1, 0.3, -1}), config(1e-3, 0.05));
  ModalField u0(g.size(), 3);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.x()[j];
    u0.at(0, j) = 0.3 + 0.2 * std::cos(3.0 * x);
    u0.at(1, j) = {0.3 * x * x, -0.1 * x * x};
    u0.at(3, j) = {0.0, 0.05 * std::pow(x, 6)};
  }
  auto a = it.initialize(u0);
  auto b = it.initialize(u0);
  double worst = 0.0;
  it.run(a, [&](const RunState& st) {
    for (std::size_t j = 0; j < g.size(); ++j) worst = std::max(worst, std::abs(st.u.at(0, j).imag()));
    CHECK(st.physical.all_finite());
  });
  it.run(b);
  CHECK(worst < 1e-12);
  CHECK(a.u.data() == b.u.data());
  CHECK(a.monitor.value() == b.monitor.value());
  CHECK(a.steps == 50);
  CHECK_FALSE(a.halted());
}

TEST_CASE("shifted and unshifted runs agree under refinement") {
  const auto s = SurfaceOfRevolution::round_sphere(1.0);
  const auto g = disc::build_grid(s, 96);
  std::vector<double> diffs;
  for (double dt : {2e-3, 1e-3, 5e-4}) {
    ModalField u0(g.size(), 0);
    for (std::size_t j = 0; j < g.size(); ++j) u0.at(0, j) = 0.4 + 0.3 * std::cos(g.x()[j]);
    auto plain_cfg = config(dt, 0.2);
    auto shift_cfg = plain_cfg;
    shift_cfg.shift = 2.0;
    const Integrator plain(g, s, 0, Nonlinearity::constant({0, 1, 0, -1}), plain_cfg);
    const Integrator shifted(g, s, 0, Nonlinearity::constant({0, 1, 0, -1}), shift_cfg);
    auto a = plain.initialize(u0);
    auto b = shifted.initialize(u0);
    plain.run(a);
    shifted.run(b);
    double d = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) d = std::max(d, std::abs(a.u.at(0, j) - b.u.at(0, j)));
    diffs.push_back(d);
  }
  CHECK(diffs[0] < 1e-4);
  CHECK(diffs[1] < diffs[0]);
  CHECK(diffs[2] < diffs[1]);
}

TEST_CASE("sphere mean follows its scalar law when F = 0") {
  const auto s = SurfaceOfRevolution::round_sphere(1.0);
  const auto g = disc::build_grid(s, 256);
  const Integrator it(g, s, 0, Nonlinearity::constant({0}), config(1e-3, 0.5));
  ModalField u0(g.size(), 0);
  for (std::size_t j = 0; j < g.size(); ++j) u0.at(0, j) = 1.0 + 0.5 * std::cos(g.x()[j]) + 0.2 * std::cos(2.0 * g.x()[j]);
  auto state = it.initialize(u0);
  const double m0 = mean_integral(g, s, state.u);
  it.run(state);
  // d/dt int u = -int (Delta + 1)^2 u = -int u on a closed surface.
  const double m1 = mean_integral(g, s, state.u);
  CHECK(std::abs(m1 - m0 * std::exp(-0.5)) / std::abs(m0) < 1e-6 * 0.5);
}

TEST_CASE("K monitor") {
  KMonitor k(4.0);
  CHECK(k.value() == 0.0);
  for (int i = 0; i <= 100; ++i) k.add(i * 0.02, 3.0);
  CHECK(k.value() == doctest::Approx(3.0 * std::pow(2.0, 0.25)).epsilon(1e-12));

  KMonitor grows(2.0);
  for (int i = 0; i <= 1000; ++i) grows.add(i * 1e-3, i * 1e-3);
  // int_0^1 t^2 dt = 1/3, trapezoid error dt^2 / 6.
  CHECK(grows.accumulator() == doctest::Approx(1.0 / 3.0).epsilon(1e-6));

  const auto s = neumann_cone(0.5);
  const auto g = disc::build_grid(s, 64);
  const Integrator zero(g, s, 0, Nonlinearity::constant({0}), config(1e-2, 1.0));
  auto state = zero.initialize(constant_field(g.size(), 0, 1.0));
  double last = 0.0;
  zero.run(state, [&](const RunState& st) {
    CHECK(st.monitor.value() == 0.0);
    CHECK(st.monitor.accumulator() >= last);
    last = st.monitor.accumulator();
  });
  CHECK(monitor_KT(state, zero.config()) == Verdict::carry_on);
}

TEST_CASE("blow-up, threshold and stability halts keep the state finite") {
  const auto s = SurfaceOfRevolution::round_sphere(1.0);
  const auto g = disc::build_grid(s, 64);
  auto cfg = config(1e-3, 2.0);
  cfg.threshold = {1e12, 0.0};
  cfg.blowup_bound = 10.0;
  const Integrator blow(g, s, 0, Nonlinearity::constant({0, 0, 0, 1}), cfg);
  auto a = blow.initialize(constant_field(g.size(), 0, 2.0));
  blow.run(a);
  CHECK(a.halt == HaltReason::blowup);
  CHECK(a.physical.all_finite());
  CHECK(a.u.max_abs() <= 10.0);

  cfg.blowup_bound = 1e8;
  cfg.threshold = {5.0, 0.0};
  const Integrator capped(g, s, 0, Nonlinearity::constant({0, 0, 0, 1}), cfg);
  auto b = capped.initialize(constant_field(g.size(), 0, 2.0));
  capped.run(b);
  CHECK(b.halt == HaltReason::k_threshold);
  CHECK(monitor_KT(b, cfg) == Verdict::halt_graceful);
  CHECK(b.physical.all_finite());

  cfg.threshold = {1e12, 0.0};
  cfg.dt = 0.5;
  const Integrator coarse(g, s, 0, Nonlinearity::constant({0, 0, 0, 1}), cfg);
  auto c = coarse.initialize(constant_field(g.size(), 0, 2.0));
  coarse.step(c);
  CHECK(c.halt == HaltReason::stability);
  CHECK(c.steps == 0);
}

TEST_CASE("manufactured constant is reproduced to round-off") {
  const auto s = SurfaceOfRevolution::round_sphere(1.0);
  auto cfg = config(1e-2, 0.2);
  const auto row = mms_single(std::make_shared<ConstantSolution>(0.7), s, Nonlinearity::constant({0, 1, 0, -1}), cfg,
                              64, 0, 1e-2, 0.2);
  CHECK(row.linf_error < 1e-12);
}

TEST_CASE("mode-1 manufactured solution on a cone excites no other mode") {
  const auto s = SurfaceOfRevolution::collar(WarpProfile::constant_cone(0.4, 1.0), OuterBoundary::dirichlet);
  const auto sol = std::make_shared<ConePowerSolution>(0.4, 1, std::vector<std::pair<double, double>>{{4.5, 1.0}, {6.5, -0.5}});
  const auto row = mms_single(sol, s, Nonlinearity::constant({0.0, 0.5}), config(1e-3, 0.05), 128, 3, 1e-3, 0.05);
  CHECK(row.spurious_mode_max < 1e-10);
  CHECK(row.linf_error < 1e-4);
}
