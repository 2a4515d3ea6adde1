#pragma once

#include "conelab/disc_operator.hpp"
#include "conelab/field.hpp"
#include "conelab/geometry.hpp"
#include "conelab/mellin_norms.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conelab::dyn {

/// Time-dependent coefficient: a constant or a piecewise-linear table held
/// constant beyond its ends.
class Coefficient {
public:
  static Coefficient constant(double value);
  /// Throws ConstructionError for unsorted or mismatched tables.
  static Coefficient table(std::vector<double> times, std::vector<double> values, double lipschitz);

  double operator()(double t) const;
  /// Declared Lipschitz bound (0 for constants).
  double lipschitz() const { return lipschitz_; }
  bool is_constant() const { return times_.empty(); }
  bool is_zero() const;
  double max_abs() const;

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

private:
  std::vector<double> times_;
  std::vector<double> values_;
  double lipschitz_ = 0.0;
};

/// F(t, u) = sum_k alpha_k(t) u^k.
class Nonlinearity {
public:
  Nonlinearity() = default;
  explicit Nonlinearity(std::vector<Coefficient> coefficients);
  static Nonlinearity constant(std::vector<double> coefficients);

  /// Index of the highest coefficient that is not identically zero (0 when F = 0).
  int degree() const;
  bool is_zero() const;
  double operator()(double t, double u) const;
  /// dF/du bound sum_k k |alpha_k(t)| |u|^{k-1}.
  double stiffness(double t, double u_max) const;
  /// Spot-checks |alpha(t1) - alpha(t2)| <= L |t1 - t2| on random pairs in [0, t_final].
  bool check_lipschitz(double t_final, std::uint64_t seed, int pairs = 64) const;

  const std::vector<Coefficient>& coefficients() const { return coefficients_; }

private:
  std::vector<Coefficient> coefficients_;
};

enum class Scheme { imex_euler, imex_bdf2 };
std::string_view to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);

/// K(T) = a exp(b T).
struct KThreshold {
  double a = 1e6;
  double b = 0.0;

  double operator()(double t) const;
};

struct SolverConfig {
  Scheme scheme = Scheme::imex_bdf2;
  double dt = 1e-3;
  double t_final = 1.0;
  /// Shift c >= 0 of the implicit operator (u = e^{ct} v).
  double shift = 0.0;
  /// Time exponent of the K(T) monitor.
  double q = 4.0;
  norms::MellinNormConfig monitor_norm{};
  KThreshold threshold{};
  /// Halt when max |u| exceeds this or turns non-finite.
  double blowup_bound = 1e8;
  /// Halt when dt * sum_k k |alpha_k| |u|_inf^{k-1} exceeds this.
  double stability_bound = 1.0;
  /// Angular points; 0 picks the dealiased count for the nonlinearity.
  std::size_t theta_points = 0;
  disc::Extension extension = disc::Extension::chosen;
};

enum class HaltReason { none, k_threshold, blowup, stability, solver_failure };
std::string_view to_string(HaltReason reason);

/// Running trapezoid of ||F(t, u(t))||^q in t; K = accumulator^{1/q}.
class KMonitor {
public:
  explicit KMonitor(double q = 4.0);

  /// Adds the norm at time t; times must be non-decreasing.
  void add(double t, double norm);
  double q() const { return q_; }
  double accumulator() const { return acc_; }
  double value() const;
  std::size_t samples() const { return samples_; }

private:
  double q_;
  double acc_ = 0.0;
  double last_t_ = 0.0;
  double last_power_ = 0.0;
  std::size_t samples_ = 0;
};

enum class Verdict { carry_on, halt_graceful };
std::string_view to_string(Verdict verdict);

struct TipSample {
  double t;
  double c0;
  bool valid;
};

struct RunState {
  double t = 0.0;
  std::size_t steps = 0;
  ModalField u;
  /// Previous level and explicit term, kept for BDF2.
  ModalField u_prev;
  ModalField f_prev;
  bool has_prev = false;
  /// u on the (x, theta) grid at time t.
  PhysicalField physical;
  KMonitor monitor;
  /// ||F(t, u)|| of the last evaluation.
  double last_f_norm = 0.0;
  std::vector<TipSample> tip_trace;
  HaltReason halt = HaltReason::none;
  std::string halt_detail;

  bool halted() const { return halt != HaltReason::none; }
};

/// Complex closure right-hand sides for one mode.
struct BoundaryData {
  std::complex<double> tip;
  std::complex<double> outer;
};

/// Extra forcing g(t) and inhomogeneous closure data (manufactured solutions).
struct ForcingSample {
  ModalField g;
  /// Per mode 0..K; empty means homogeneous closures.
  std::vector<BoundaryData> u_data;
  std::vector<BoundaryData> w_data;
};

class Forcing {
public:
  virtual ~Forcing() = default;
  virtual ForcingSample evaluate(double t, const std::vector<disc::ModeOperator>& ops) const = 0;
};

/// IMEX integrator for u' + (Delta + 1)^2 u = F(t, u) + g(t) on one grid.
/// The linear part is implicit (one factored nested solve per mode), F is
/// extrapolated explicitly. Immutable after construction; steps are reentrant.
class Integrator {
public:
  Integrator(const disc::RadialGrid& grid, const geometry::SurfaceOfRevolution& surface, int k_max,
             Nonlinearity nonlinearity, SolverConfig cfg, std::shared_ptr<const Forcing> forcing = nullptr);

  const disc::RadialGrid& grid() const { return grid_; }
  const geometry::SurfaceOfRevolution& surface() const { return surface_; }
  const std::vector<disc::ModeOperator>& operators() const { return ops_; }
  const ThetaTransform& transform() const { return *transform_; }
  const SolverConfig& config() const { return cfg_; }
  const Nonlinearity& nonlinearity() const { return nl_; }
  int k_max() const { return k_max_; }

  RunState initialize(ModalField u0) const;

  /// F(t, u) evaluated pointwise on the dealiased angular grid.
  ModalField evaluate_F(const ModalField& u, double t) const;
  /// ||v|| in the monitor norm.
  double monitor_norm(const ModalField& v) const;

  /// One step; sets state.halt instead of throwing on blow-up, K-threshold or
  /// explicit-stability violations. dt = 0 leaves the state unchanged.
  void step(RunState& state) const;

  /// Steps to t_final (or a halt), calling `observer` after every step.
  void run(RunState& state, const std::function<void(const RunState&)>& observer = {}) const;

  /// Number of steps that reach t_final.
  std::size_t step_count() const;

private:
  void record(RunState& state, PhysicalField physical) const;

  disc::RadialGrid grid_;
  geometry::SurfaceOfRevolution surface_;
  int k_max_;
  Nonlinearity nl_;
  SolverConfig cfg_;
  std::shared_ptr<const Forcing> forcing_;
  std::vector<disc::ModeOperator> ops_;
  std::vector<disc::NestedSolver> euler_;
  std::vector<disc::NestedSolver> bdf2_;
  std::unique_ptr<ThetaTransform> transform_;
};

/// K monitor verdict for the current state: halt once K exceeds threshold(t).
Verdict monitor_KT(const RunState& state, const SolverConfig& cfg);

} // namespace conelab::dyn
