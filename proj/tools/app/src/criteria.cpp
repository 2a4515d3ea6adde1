#include "conelab/app/criteria.hpp"

#include "conelab/app/pipeline.hpp"

#include <conelab/disc_operator.hpp>
#include <conelab/errors.hpp>
#include <conelab/geometry.hpp>
#include <conelab/mellin_analysis.hpp>
#include <conelab/mellin_norms.hpp>

#include <Eigen/Core>
#include <boost/numeric/interval.hpp>
#include <fmt/format.h>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

namespace conelab::app {

namespace {

using Interval = boost::numeric::interval<
    double, boost::numeric::interval_lib::policies<boost::numeric::interval_lib::save_state<
                                                       boost::numeric::interval_lib::rounded_transc_std<double>>,
                                                   boost::numeric::interval_lib::checking_base<double>>>;

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Certified window bounds: both endpoints as enclosing intervals.
struct IntervalWindow {
  Interval lo;
  Interval hi;
  Interval pq;
};

IntervalWindow interval_window(int n, double p, double q, double lambda1) {
  const Interval centre = Interval(n - 1) / 2.0;
  const Interval root = boost::numeric::sqrt(centre * centre - Interval(lambda1));
  const Interval cap_a = root - 1.0;
  const Interval cap_b = Interval(n + 1) / 2.0;
  const Interval hi = boost::numeric::min(cap_a, cap_b);
  const Interval lo = Interval(n - 3) / 2.0 + Interval(2.0) / Interval(q);
  const Interval pq = Interval(2.0) / Interval(q) + Interval(n + 1) / Interval(p);
  return {lo, hi, pq};
}

bool contains(const Interval& i, double v) { return i.lower() <= v && v <= i.upper(); }

/// |a - b| <= tol for sorted pole lists.
bool same_roots(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b, double tol) {
  if (a.size() != b.size()) return false;
  const auto order = [](const std::complex<double>& u, const std::complex<double>& v) {
    return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
  };
  std::sort(a.begin(), a.end(), order);
  std::sort(b.begin(), b.end(), order);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}

} // namespace

CriterionResult check_symbol_oracle(std::uint64_t seed) {
  const Stopwatch clock;
  CriterionResult r{1, "symbol oracle equivalence", false, "", "", 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_n(1, 4);
  std::uniform_real_distribution<double> pick_lambda(-50.0, 0.0);
  double worst = 0.0;
  int mismatches = 0;
  constexpr int trials = 50;
  for (int i = 0; i < trials; ++i) {
    const int n = pick_n(rng);
    double lambda = pick_lambda(rng);
    if (lambda == 0.0) lambda = -1e-3;
    const auto spectrum = geometry::CrossSectionSpectrum::from_table(n, {0.0, lambda});
    const auto report = mellin::laplacian_poles(spectrum);
    const auto entry = std::find_if(report.entries.begin(), report.entries.end(),
                                    [&](const mellin::PoleEntry& e) { return e.lambda == lambda; });
    std::vector<std::complex<double>> ours;
    for (std::size_t k = 0; k < entry->poles.size(); ++k) {
      for (int m = 0; m < entry->multiplicities[k]; ++m) ours.push_back(entry->poles[k]);
    }
    // z^2 - (n-1) z + lambda, coefficients in increasing degree.
    Eigen::Vector3d coeffs(lambda, -(n - 1.0), 1.0);
    Eigen::PolynomialSolver<double, 2> solver(coeffs);
    std::vector<std::complex<double>> theirs(solver.roots().begin(), solver.roots().end());
    if (!same_roots(ours, theirs, 1e-10)) ++mismatches;
    for (std::size_t k = 0; k < std::min(ours.size(), theirs.size()); ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : theirs) best = std::min(best, std::abs(ours[k] - t));
      worst = std::max(worst, best);
    }
  }
  r.seconds = clock.seconds();
  r.pass = mismatches == 0 && r.seconds < 1.0;
  r.value = fmt::format("max |pole - root| = {:.2e}", worst);
  r.detail = fmt::format("{} draws, {} mismatches above 1e-10, runtime limit 1 s", trials, mismatches);
  return r;
}

CriterionResult check_weight_window(std::uint64_t seed) {
  const Stopwatch clock;
  CriterionResult r{2, "weight-window table", false, "", "", 0.0};
  std::vector<std::string> failures;

  // rho0 = 1/3, q = 4: window (-0.5, 1).
  {
    const double lambda1 = -9.0;
    const auto w = mellin::admissible_weights(1, 8.0, 4.0, lambda1, mellin::WeightPath::evolution);
    const auto iw = interval_window(1, 8.0, 4.0, lambda1);
    const bool ok = contains(iw.lo, -0.5) && contains(iw.hi, 1.0) && w.gamma_min == -0.5 && w.gamma_max == 1.0 &&
                    contains(iw.lo, w.gamma_min) && contains(iw.hi, w.gamma_max);
    if (!ok) failures.push_back(fmt::format("window ({}, {}) != (-0.5, 1)", w.gamma_min, w.gamma_max));
  }
  // p = 8, q = 4: both data constraints hold.
  {
    const auto w = mellin::admissible_weights(1, 8.0, 4.0, -9.0, mellin::WeightPath::evolution);
    const auto iw = interval_window(1, 8.0, 4.0, -9.0);
    const Interval base = Interval(-1.0);
    const bool pq_certain = iw.pq.upper() < 2.0 && contains(iw.pq, 0.75);
    const bool q_certain = (Interval(2.0) / Interval(4.0)).upper() < (iw.hi - base).lower() && contains(iw.hi - base, 2.0);
    if (!(pq_certain && q_certain && w.p_constraint && w.q_constraint)) failures.push_back("data constraints for p = 8, q = 4");
  }
  // lambda1 = -0.01, q = 4: empty.
  {
    const auto w = mellin::admissible_weights(1, 8.0, 4.0, -0.01, mellin::WeightPath::evolution);
    const auto iw = interval_window(1, 8.0, 4.0, -0.01);
    const bool ok = iw.hi.upper() < iw.lo.lower() && w.empty() && contains(iw.hi, -0.9) && contains(iw.lo, -0.5);
    if (!ok) failures.push_back("lambda1 = -0.01 window not certified empty");
  }

  const auto worked_failures = failures.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_n(1, 4);
  std::uniform_real_distribution<double> pick_lambda(-50.0, 0.0);
  std::uniform_real_distribution<double> pick_q(1.01, 20.0);
  std::uniform_real_distribution<double> pick_p(1.01, 20.0);
  int disagreements = 0, undecided = 0;
  constexpr int trials = 200;
  for (int i = 0; i < trials; ++i) {
    const int n = pick_n(rng);
    double lambda1 = pick_lambda(rng);
    if (lambda1 == 0.0) lambda1 = -1e-3;
    const double q = pick_q(rng);
    const double p = pick_p(rng);
    const auto w = mellin::admissible_weights(n, p, q, lambda1, mellin::WeightPath::evolution);
    const auto iw = interval_window(n, p, q, lambda1);
    if (iw.lo.upper() < iw.hi.lower()) {
      disagreements += w.empty() ? 1 : 0;
    } else if (iw.hi.upper() <= iw.lo.lower()) {
      disagreements += w.empty() ? 0 : 1;
    } else {
      ++undecided;
    }
  }
  if (disagreements > 0) failures.push_back(fmt::format("{} randomized emptiness disagreements", disagreements));
  r.seconds = clock.seconds();
  r.pass = failures.empty() && undecided == 0;
  r.value = fmt::format("{}/3 worked cases, {}/{} random draws agree", 3 - worked_failures, trials - disagreements - undecided, trials);
  r.detail = failures.empty() ? fmt::format("{} draws undecided by interval arithmetic", undecided)
                              : fmt::format("{}", fmt::join(failures, "; "));
  return r;
}

CriterionResult check_curvature_boundary() {
  const Stopwatch clock;
  CriterionResult r{3, "curvature-condition boundary", false, "", "", 0.0};
  const auto at = [](double rho0) {
    const auto spectrum = geometry::CrossSectionSpectrum::circle(rho0, 1);
    return mellin::curvature_condition(1, *spectrum.lambda1());
  };
  const bool edge = at(0.5);
  const bool past = at(0.5 + 1e-6);
  r.seconds = clock.seconds();
  r.pass = edge && !past;
  r.value = fmt::format("rho0 = 0.5 -> {}, rho0 = 0.5 + 1e-6 -> {}", edge, past);
  r.detail = "expected true, false";
  return r;
}

CriterionResult check_mms_convergence(const RunConfig& scenario) {
  const Stopwatch clock;
  CriterionResult r{4, "manufactured-solution convergence", false, "", "", 0.0};
  try {
    const auto table = run_mms(scenario);
    r.seconds = clock.seconds();
    const bool spatial = table.spatial_order >= 3.7;
    const bool temporal = std::abs(table.temporal_order - 2.0) <= 0.2;
    r.pass = spatial && temporal && r.seconds < 120.0;
    r.value = fmt::format("spatial order {:.3f}, temporal order {:.3f}", table.spatial_order, table.temporal_order);
    r.detail = fmt::format("need spatial >= 3.7, temporal 2 +- 0.2, runtime < 120 s ({})", table.solution);
  } catch (const std::exception& e) {
    r.seconds = clock.seconds();
    r.detail = e.what();
  }
  return r;
}

CriterionResult check_constant_data_rate(const RunConfig& scenario) {
  const Stopwatch clock;
  CriterionResult r{5, "constant-data decay rate", false, "", "", 0.0};
  constexpr double expected = 2.0;
  constexpr double tolerance = 0.15;
  try {
    const auto sim = run_simulation(scenario, std::nullopt);
    const auto analysis = run_analysis(scenario);
    const auto fit = fit_field(scenario, analysis, sim.state.u, sim.grid.x(), sim.state.t);
    r.seconds = clock.seconds();
    const double alpha = fit.report.alpha_dev;
    const bool setup = scenario.discretization.n_radial == 512 && !sim.state.halted();
    r.pass = setup && std::abs(alpha - expected) <= tolerance && fit.report.verdict == fit::Verdict::pass &&
             r.seconds < 180.0;
    r.value = fmt::format("alpha_dev = {:.4f} (R^2 {:.5f}, {} shells)", alpha, fit.report.r2, fit.report.shells);
    r.detail = fmt::format("need {} +- {} at N = 512, verdict {}, alpha_pred {:.4f}, runtime < 180 s", expected,
                           tolerance, fit::to_string(fit.report.verdict), fit.report.alpha_pred.value_or(NAN));
    if (sim.state.halted()) r.detail += fmt::format("; run halted: {}", sim.state.halt_detail);
  } catch (const std::exception& e) {
    r.seconds = clock.seconds();
    r.detail = e.what();
  }
  return r;
}

CriterionResult check_geometry_effect(const std::vector<RunConfig>& sweep) {
  const Stopwatch clock;
  CriterionResult r{6, "geometry effect on mode-1 decay", false, "", "", 0.0};
  // Oracle k / rho0 with per-angle tolerances.
  const std::map<double, double> tolerances{{0.4, 0.20}, {0.6, 0.20}, {0.8, 0.15}};
  std::vector<std::string> values, notes;
  std::vector<std::pair<double, fit::DecayFitReport>> reports;
  bool ok = sweep.size() == tolerances.size();
  if (!ok) notes.push_back(fmt::format("expected {} sweep scenarios, got {}", tolerances.size(), sweep.size()));
  try {
    for (const auto& cfg : sweep) {
      const double rho0 = cfg.geometry.north.rho0;
      const auto tol = std::find_if(tolerances.begin(), tolerances.end(),
                                    [&](const auto& e) { return std::abs(e.first - rho0) < 1e-12; });
      if (cfg.geometry.north.kind != geometry::ProfileKind::constant_cone || tol == tolerances.end()) {
        ok = false;
        notes.push_back(fmt::format("scenario with rho0 = {} is not part of the sweep", rho0));
        continue;
      }
      const auto sim = run_simulation(cfg, std::nullopt);
      const auto analysis = run_analysis(cfg);
      const auto fit = fit_field(cfg, analysis, sim.state.u, sim.grid.x(), sim.state.t);
      const auto mode = std::find_if(fit.report.modes.begin(), fit.report.modes.end(),
                                     [](const fit::ModeFit& m) { return m.mode == 1; });
      const double oracle = 1.0 / rho0;
      const double alpha = mode == fit.report.modes.end() ? NAN : mode->alpha;
      const bool within = std::abs(alpha - oracle) <= tol->second;
      const bool conclusive = fit.report.verdict != fit::Verdict::inconclusive;
      ok = ok && within && conclusive && !sim.state.halted();
      values.push_back(fmt::format("{:.4f}", alpha));
      notes.push_back(fmt::format("rho0 {}: alpha_1 {:.4f} vs {:.4f} +- {}, verdict {}", rho0, alpha, oracle,
                                  tol->second, fit::to_string(fit.report.verdict)));
      reports.emplace_back(rho0, fit.report);
    }
    const auto ordering = fit::check_ordering(reports, 1);
    ok = ok && ordering.verdict == fit::Verdict::pass;
    notes.push_back(fmt::format("ordering {}", fit::to_string(ordering.verdict)));
  } catch (const std::exception& e) {
    ok = false;
    notes.push_back(e.what());
  }
  r.seconds = clock.seconds();
  r.pass = ok && r.seconds < 600.0;
  r.value = fmt::format("alpha_1 = [{}]", fmt::join(values, ", "));
  r.detail = fmt::format("{}", fmt::join(notes, "; "));
  return r;
}

CriterionResult check_pointwise_bound(std::uint64_t seed) {
  const Stopwatch clock;
  CriterionResult r{7, "weighted pointwise bound", false, "", "", 0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int passed = 0;
  double worst = 1.0;
  constexpr int trials = 10;
  for (int i = 0; i < trials; ++i) {
    const double rho0 = 0.3 + 0.7 * unit(rng);
    const double collar = 1.0;
    const auto surface =
        geometry::SurfaceOfRevolution::collar(geometry::WarpProfile::constant_cone(rho0, collar),
                                              geometry::OuterBoundary::neumann);
    norms::MellinNormConfig cfg;
    cfg.s = 1;
    cfg.p = 4.0;
    cfg.gamma = unit(rng);
    cfg.n = 1;
    cfg.omega = norms::default_cutoff(collar);
    const double excess = 0.25 + 0.75 * unit(rng);
    const double power = cfg.gamma - 1.0 + excess;
    const double mix = unit(rng);
    const double phase = 2.0 * std::numbers::pi * unit(rng);
    const auto omega = cfg.omega;
    const auto field = [=](double x, double theta) {
      return std::pow(x, power) * omega(x) * (1.0 + mix * std::cos(theta + phase));
    };
    const auto report = norms::pointwise_bound_check(field, surface, cfg, 128, 2);
    if (report.applicable && report.pass) ++passed;
    worst = std::max(worst, report.drift);
  }
  r.seconds = clock.seconds();
  r.pass = passed == trials;
  r.value = fmt::format("{}/{} fields pass, worst drift {:.4f}", passed, trials, worst);
  r.detail = "s = 1, p = 4, N = 128 -> 256, drift limit 2";
  return r;
}

CriterionResult check_sectoriality() {
  const Stopwatch clock;
  CriterionResult r{8, "sectoriality and smoothing diagnostics", false, "", "", 0.0};
  double min_real = std::numeric_limits<double>::infinity();
  double worst_sup = 0.0;
  std::size_t operators = 0;
  for (double rho0 : {0.4, 0.8}) {
    for (auto bc : {geometry::OuterBoundary::dirichlet, geometry::OuterBoundary::neumann}) {
      const auto surface =
          geometry::SurfaceOfRevolution::collar(geometry::WarpProfile::constant_cone(rho0, 1.0), bc);
      const auto grid = disc::build_grid(surface, 128);
      for (int k = 0; k <= 8; ++k) {
        const auto op = disc::build_mode_operator(grid, surface, k);
        for (double a : {0.25, 0.5, 0.75}) {
          const auto d = disc::spectrum_diagnostics(op, 0.0, a);
          min_real = std::min(min_real, d.min_real_part);
          worst_sup = std::max(worst_sup, std::abs(d.smoothing_sup - d.smoothing_expected));
        }
        ++operators;
      }
    }
  }
  r.seconds = clock.seconds();
  r.pass = min_real >= -1e-8 && worst_sup <= 1e-10;
  r.value = fmt::format("min Re = {:.6e}, max |sup - (a/e)^a| = {:.2e}", min_real, worst_sup);
  r.detail = fmt::format("{} mode operators, k <= 8, N = 128, rho0 in {{0.4, 0.8}}", operators);
  return r;
}

CriterionResult check_monitor(const RunConfig& focusing) {
  const Stopwatch clock;
  CriterionResult r{9, "K(T) monitor", false, "", "", 0.0};
  std::vector<std::string> notes;
  bool zero_ok = false, constant_ok = false, focusing_ok = false;
  try {
    RunConfig base;
    base.geometry.north.kind = geometry::ProfileKind::constant_cone;
    base.geometry.north.rho0 = 0.5;
    base.geometry.north.collar_length = 1.0;
    base.geometry.outer_bc = geometry::OuterBoundary::neumann;
    base.discretization.n_radial = 128;
    base.discretization.k_max = 2;
    base.dynamics.dt = 1e-3;
    base.dynamics.t_final = 0.2;
    base.dynamics.initial.constant = 0.5;
    base.dynamics.initial.bumps.push_back({1, 0.3, 0.5, 0.25, 0.0});

    // F = 0: K stays exactly zero along the whole run.
    {
      const auto analysis = run_analysis(base);
      const auto surface = build_surface(base.geometry);
      const auto grid = build_grid(base, surface);
      const dyn::Integrator integrator(grid, surface, base.discretization.k_max, dyn::Nonlinearity{},
                                       solver_config(base, *analysis.gamma, surface.collar_length()));
      auto state = integrator.initialize(initial_field(base, grid, surface.collar_length()));
      double largest = 0.0;
      integrator.run(state, [&](const dyn::RunState& s) { largest = std::max(largest, s.monitor.value()); });
      largest = std::max(largest, state.monitor.value());
      zero_ok = largest == 0.0 && !state.halted();
      notes.push_back(fmt::format("F = 0: max K = {}", largest));
    }
    // F = beta: ||F|| is constant in time, so K(T) = ||beta|| T^{1/q}.
    {
      RunConfig cfg = base;
      const double beta = 0.7;
      cfg.dynamics.nonlinearity = {CoefficientSpec{beta, {}, {}, 0.0}};
      const auto analysis = run_analysis(cfg);
      const auto surface = build_surface(cfg.geometry);
      const auto grid = build_grid(cfg, surface);
      const dyn::Integrator integrator(grid, surface, cfg.discretization.k_max, build_nonlinearity(cfg.dynamics),
                                       solver_config(cfg, *analysis.gamma, surface.collar_length()));
      auto state = integrator.initialize(initial_field(cfg, grid, surface.collar_length()));
      integrator.run(state);
      ModalField constant(grid.size(), cfg.discretization.k_max);
      for (std::size_t j = 0; j < grid.size(); ++j) constant.at(0, j) = beta;
      const double expected = integrator.monitor_norm(constant) * std::pow(cfg.dynamics.t_final, 1.0 / cfg.analysis.q);
      const double rel = std::abs(state.monitor.value() - expected) / expected;
      constant_ok = rel <= 1e-6 && !state.halted();
      notes.push_back(fmt::format("constant F: K = {:.10f} vs {:.10f} (rel {:.1e})", state.monitor.value(), expected,
                                  rel));
    }
    // Focusing F = u^3 from the scenario.
    {
      const auto sim = run_simulation(focusing, std::nullopt);
      const auto& s = sim.state;
      const bool finite = s.physical.all_finite() && std::isfinite(s.monitor.value()) &&
                          std::isfinite(s.last_f_norm) && std::isfinite(s.u.max_abs());
      focusing_ok = s.halt == dyn::HaltReason::k_threshold && finite &&
                    dyn::monitor_KT(s, solver_config(focusing, sim.gamma, 1.0)) == dyn::Verdict::halt_graceful;
      notes.push_back(fmt::format("focusing: halt {} at t = {} ({}), max |u| = {:.3e}", dyn::to_string(s.halt), s.t,
                                  s.halt_detail, s.physical.max_abs()));
    }
  } catch (const std::exception& e) {
    notes.push_back(e.what());
  }
  r.seconds = clock.seconds();
  r.pass = zero_ok && constant_ok && focusing_ok;
  r.value = fmt::format("zero {}, constant {}, focusing {}", zero_ok ? "ok" : "bad", constant_ok ? "ok" : "bad",
                        focusing_ok ? "HALT-GRACEFUL" : "bad");
  r.detail = fmt::format("{}", fmt::join(notes, "; "));
  return r;
}

std::string format_result(const CriterionResult& r) {
  return fmt::format("[{}] {} {}: {} ({}) {:.2f}s", r.pass ? "PASS" : "FAIL", r.id, r.name, r.value, r.detail,
                     r.seconds);
}

} // namespace conelab::app
