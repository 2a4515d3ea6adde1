#include "conelab/integrator.hpp"

#include "conelab/asymptotics_fit.hpp"
#include "conelab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace conelab::dyn {

Coefficient Coefficient::constant(double value) {
  Coefficient c;
  c.values_ = {value};
  return c;
}

Coefficient Coefficient::table(std::vector<double> times, std::vector<double> values, double lipschitz) {
  if (times.empty() || times.size() != values.size()) {
    throw ConstructionError("coefficient table needs matching, non-empty time and value lists");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw ConstructionError("coefficient table times must be strictly increasing");
    }
  }
  if (!(lipschitz >= 0.0)) {
    throw ConstructionError("declared Lipschitz bound must be non-negative");
  }
  Coefficient c;
  c.times_ = std::move(times);
  c.values_ = std::move(values);
  c.lipschitz_ = lipschitz;
  return c;
}

double Coefficient::operator()(double t) const {
  if (times_.empty()) return values_.empty() ? 0.0 : values_.front();
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto i = static_cast<std::size_t>(it - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return (1.0 - w) * values_[i - 1] + w * values_[i];
}

bool Coefficient::is_zero() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double Coefficient::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

Nonlinearity::Nonlinearity(std::vector<Coefficient> coefficients) : coefficients_(std::move(coefficients)) {}

Nonlinearity Nonlinearity::constant(std::vector<double> coefficients) {
  std::vector<Coefficient> c;
  for (double v : coefficients) c.push_back(Coefficient::constant(v));
  return Nonlinearity(std::move(c));
}

int Nonlinearity::degree() const {
  for (int k = static_cast<int>(coefficients_.size()) - 1; k >= 0; --k) {
    if (!coefficients_[static_cast<std::size_t>(k)].is_zero()) return k;
  }
  return 0;
}

bool Nonlinearity::is_zero() const {
  return std::all_of(coefficients_.begin(), coefficients_.end(), [](const Coefficient& c) { return c.is_zero(); });
}

double Nonlinearity::operator()(double t, double u) const {
  double acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) {
    acc = acc * u + (*it)(t);
  }
  return acc;
}

double Nonlinearity::stiffness(double t, double u_max) const {
  double acc = 0.0;
  for (std::size_t k = 1; k < coefficients_.size(); ++k) {
    acc += static_cast<double>(k) * std::abs(coefficients_[k](t)) * std::pow(u_max, static_cast<double>(k - 1));
  }
  return acc;
}

bool Nonlinearity::check_lipschitz(double t_final, std::uint64_t seed, int pairs) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.0, t_final);
  for (const auto& c : coefficients_) {
    if (c.is_constant()) continue;
    for (int i = 0; i < pairs; ++i) {
      const double t1 = dist(rng);
      const double t2 = dist(rng);
      if (std::abs(c(t1) - c(t2)) > c.lipschitz() * std::abs(t1 - t2) * (1.0 + 1e-12) + 1e-15) {
        return false;
      }
    }
  }
  return true;
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::imex_euler ? "imex-euler" : "imex-bdf2";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "imex-euler") return Scheme::imex_euler;
  if (name == "imex-bdf2") return Scheme::imex_bdf2;
  throw PreconditionError(fmt::format("unknown scheme '{}' (expected imex-euler or imex-bdf2)", name));
}

double KThreshold::operator()(double t) const {
  return a * std::exp(b * t);
}

std::string_view to_string(HaltReason reason) {
  switch (reason) {
  case HaltReason::none: return "none";
  case HaltReason::k_threshold: return "k-threshold";
  case HaltReason::blowup: return "blow-up";
  case HaltReason::stability: return "explicit-stability";
  case HaltReason::solver_failure: return "solver-failure";
  }
  return "none";
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::carry_on ? "CONTINUE" : "HALT-GRACEFUL";
}

KMonitor::KMonitor(double q) : q_(q) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw PreconditionError(fmt::format("monitor exponent q must lie in (1, inf), got {}", q));
  }
}

void KMonitor::add(double t, double norm) {
  const double power = std::pow(norm, q_);
  if (samples_ > 0) {
    if (t < last_t_) {
      throw PreconditionError("KMonitor: times must be non-decreasing");
    }
    acc_ += 0.5 * (t - last_t_) * (last_power_ + power);
  }
  last_t_ = t;
  last_power_ = power;
  ++samples_;
}

double KMonitor::value() const {
  return std::pow(acc_, 1.0 / q_);
}

Verdict monitor_KT(const RunState& state, const SolverConfig& cfg) {
  const double k = state.monitor.value();
  return std::isfinite(k) && k <= cfg.threshold(state.t) ? Verdict::carry_on : Verdict::halt_graceful;
}

Integrator::Integrator(const disc::RadialGrid& grid, const geometry::SurfaceOfRevolution& surface, int k_max,
                       Nonlinearity nonlinearity, SolverConfig cfg, std::shared_ptr<const Forcing> forcing)
    : grid_(grid), surface_(surface), k_max_(k_max), nl_(std::move(nonlinearity)), cfg_(cfg),
      forcing_(std::move(forcing)) {
  if (k_max < 0) {
    throw PreconditionError("k_max must be >= 0");
  }
  if (!(cfg_.dt >= 0.0) || !(cfg_.t_final > 0.0) || !(cfg_.shift >= 0.0)) {
    throw PreconditionError(fmt::format("invalid solver configuration: dt = {}, T = {}, c = {}", cfg_.dt,
                                        cfg_.t_final, cfg_.shift));
  }
  (void)KMonitor(cfg_.q);
  for (int k = 0; k <= k_max; ++k) {
    ops_.push_back(disc::build_mode_operator(grid_, surface_, k, cfg_.extension));
  }
  for (const auto& op : ops_) {
    euler_.emplace_back(op, 1.0, cfg_.dt, cfg_.shift);
    if (cfg_.scheme == Scheme::imex_bdf2) {
      bdf2_.emplace_back(op, 1.5, cfg_.dt, cfg_.shift);
    }
  }
  const std::size_t m =
      cfg_.theta_points > 0 ? cfg_.theta_points : dealiased_theta_points(k_max, std::max(nl_.degree(), 1));
  transform_ = std::make_unique<ThetaTransform>(grid_.size(), k_max, m);
}

std::size_t Integrator::step_count() const {
  if (cfg_.dt == 0.0) return 0;
  return static_cast<std::size_t>(std::llround(cfg_.t_final / cfg_.dt));
}

ModalField Integrator::evaluate_F(const ModalField& u, double t) const {
  if (nl_.is_zero()) {
    return ModalField(u.radial_size(), u.k_max());
  }
  auto phys = transform_->to_physical(u);
  for (auto& v : phys.data()) v = nl_(t, v);
  return transform_->to_modal(phys);
}

double Integrator::monitor_norm(const ModalField& v) const {
  return norms::mellin_norm(v, norms::NormContext{grid_, surface_, *transform_}, cfg_.monitor_norm);
}

void Integrator::record(RunState& state, PhysicalField physical) const {
  state.physical = std::move(physical);
  const auto c0 = fit::extract_tip_constant(state.u, grid_.x());
  state.tip_trace.push_back({state.t, c0.value, c0.valid});
}

RunState Integrator::initialize(ModalField u0) const {
  if (u0.radial_size() != grid_.size() || u0.k_max() != k_max_) {
    throw PreconditionError("initial field does not match the integrator's grid and mode range");
  }
  RunState state;
  state.monitor = KMonitor(cfg_.q);
  state.u = std::move(u0);
  for (std::size_t j = 0; j < grid_.size(); ++j) state.u.at(0, j).imag(0.0);
  record(state, transform_->to_physical(state.u));
  return state;
}

void Integrator::step(RunState& state) const {
  if (state.halted()) return;
  const double dt = cfg_.dt;
  if (dt == 0.0) {
    ++state.steps;
    return;
  }
  const double t = state.t;
  const double u_inf = state.physical.max_abs();
  const double stiff = dt * nl_.stiffness(t, u_inf);
  if (stiff > cfg_.stability_bound) {
    state.halt = HaltReason::stability;
    state.halt_detail = fmt::format("dt * |dF/du| = {:.3e} exceeds {:.3e} at t = {}", stiff, cfg_.stability_bound, t);
    return;
  }

  ModalField f_now = evaluate_F(state.u, t);
  state.last_f_norm = monitor_norm(f_now);
  state.monitor.add(t, state.last_f_norm);
  if (monitor_KT(state, cfg_) == Verdict::halt_graceful) {
    state.halt = HaltReason::k_threshold;
    state.halt_detail = fmt::format("K = {:.6e} exceeds threshold {:.6e} at t = {}", state.monitor.value(),
                                    cfg_.threshold(t), t);
    return;
  }

  const double t_next = static_cast<double>(state.steps + 1) * dt;
  const bool bdf2 = cfg_.scheme == Scheme::imex_bdf2 && state.has_prev;
  const double e1 = std::exp(cfg_.shift * dt);
  const double e2 = e1 * e1;

  std::optional<ForcingSample> forcing;
  if (forcing_) {
    forcing = forcing_->evaluate(t_next, ops_);
  }

  const std::size_t n = grid_.size();
  ModalField next(n, k_max_);
  std::vector<double> rhs_re(n), rhs_im(n);
  try {
    for (int k = 0; k <= k_max_; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> r;
        if (bdf2) {
          r = 0.5 * (4.0 * e1 * state.u.at(k, j) - e2 * state.u_prev.at(k, j)) +
              dt * (2.0 * e1 * f_now.at(k, j) - e2 * state.f_prev.at(k, j));
        } else {
          r = e1 * state.u.at(k, j) + dt * e1 * f_now.at(k, j);
        }
        if (forcing) r += dt * forcing->g.at(k, j);
        rhs_re[j] = r.real();
        rhs_im[j] = r.imag();
      }
      BoundaryData ud{}, wd{};
      if (forcing && !forcing->u_data.empty()) {
        ud = forcing->u_data[static_cast<std::size_t>(k)];
        wd = forcing->w_data[static_cast<std::size_t>(k)];
      }
      const auto& solver = bdf2 ? bdf2_[static_cast<std::size_t>(k)] : euler_[static_cast<std::size_t>(k)];
      const auto re = solver.solve(rhs_re, {ud.tip.real(), ud.outer.real()}, {wd.tip.real(), wd.outer.real()});
      std::vector<double> im(n, 0.0);
      if (k > 0) {
        im = solver.solve(rhs_im, {ud.tip.imag(), ud.outer.imag()}, {wd.tip.imag(), wd.outer.imag()});
      }
      for (std::size_t j = 0; j < n; ++j) next.at(k, j) = {re[j], im[j]};
    }
  } catch (const SolverError& e) {
    state.halt = HaltReason::solver_failure;
    state.halt_detail = e.what();
    return;
  }

  auto phys = transform_->to_physical(next);
  const double next_inf = phys.max_abs();
  if (!phys.all_finite() || !std::isfinite(next_inf) || next_inf > cfg_.blowup_bound) {
    state.halt = HaltReason::blowup;
    state.halt_detail = fmt::format("max |u| = {:.3e} at t = {}", next_inf, t_next);
    return;
  }

  state.u_prev = std::move(state.u);
  state.f_prev = std::move(f_now);
  state.has_prev = true;
  state.u = std::move(next);
  state.t = t_next;
  ++state.steps;
  record(state, std::move(phys));
}

void Integrator::run(RunState& state, const std::function<void(const RunState&)>& observer) const {
  if (!(cfg_.dt > 0.0)) {
    throw PreconditionError("run needs dt > 0");
  }
  const std::size_t total = step_count();
  while (state.steps < total && !state.halted()) {
    step(state);
    if (observer && !state.halted()) observer(state);
  }
  if (!state.halted()) {
    // Close the monitor integral at the final time.
    state.last_f_norm = monitor_norm(evaluate_F(state.u, state.t));
    state.monitor.add(state.t, state.last_f_norm);
  }
}

} // namespace conelab::dyn
