#pragma once

#include "conelab/banded.hpp"
#include "conelab/geometry.hpp"
#include "conelab/mellin_analysis.hpp"

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace conelab::disc {

/// How the innermost node x_min is placed.
struct XMinPolicy {
  double value = 1e-3;
  /// When true x_min = value * collar length, otherwise x_min = value.
  bool relative = true;
};

/// Radial nodes x_j = X(sigma_j) with sigma uniform. The map is log-uniform
/// near every tip (sigma = log x on a collar) and, on closed surfaces,
/// sigma = log x - log(L - x) + x / b, which is uniform in x away from both
/// poles and symmetric under x -> L - x.
class RadialGrid {
public:
  std::size_t size() const { return x_.size(); }
  geometry::Topology topology() const { return topology_; }
  double spacing() const { return h_; }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  double meridian_length() const { return length_; }

  std::span<const double> x() const { return x_; }
  std::span<const double> sigma() const { return sigma_; }
  /// dx/dsigma and d^2x/dsigma^2 at the nodes.
  std::span<const double> dx() const { return dx_; }
  std::span<const double> d2x() const { return d2x_; }
  /// Positions and dx/dsigma at the half nodes sigma_{j+1/2}, j = 0..N-2.
  std::span<const double> half_x() const { return half_x_; }
  std::span<const double> half_dx() const { return half_dx_; }

  /// Weights w_j with sum w_j f(x_j) ~ int_{x_min}^{x_max} f(x) dx (6th-order
  /// Gregory rule in sigma).
  std::span<const double> dx_weights() const { return dx_weights_; }

  /// Weights for the Mellin measure rho(x) dx / x = R(x) dx / x^2 on the grid.
  std::vector<double> mellin_weights(const geometry::SurfaceOfRevolution& surface) const;

  /// Maps x to sigma and back (exposed for tests and CSV readers).
  double sigma_of(double x) const;
  double x_of(double sigma) const;

private:
  friend RadialGrid build_grid(const geometry::SurfaceOfRevolution&, int, XMinPolicy);

  double psi(double x) const;
  double dpsi(double x) const;
  double d2psi(double x) const;

  geometry::Topology topology_ = geometry::Topology::collar;
  double length_ = 0.0;
  double blend_ = 0.0;
  double h_ = 0.0;
  std::vector<double> x_, sigma_, dx_, d2x_, half_x_, half_dx_, dx_weights_;
};

/// Throws PreconditionError for N < 16 or x_min >= x_max.
RadialGrid build_grid(const geometry::SurfaceOfRevolution& surface, int n, XMinPolicy policy = {});

/// One row of a sparse banded operator: coefficients for columns first..first+size-1.
struct StencilRow {
  std::size_t first = 0;
  std::vector<double> coeffs;

  double apply(std::span<const double> u) const;
};

enum class Extension {
  /// Domain H^{s+2,gamma+2} (+) C: constants kept on the k = 0 mode.
  chosen,
  /// Constants removed: the k = 0 tip row becomes u(x_min) = 0.
  minimal,
};

enum class ClosureKind { tip_robin, tip_dirichlet, outer_dirichlet, outer_neumann, south_robin };

std::string_view to_string(ClosureKind kind);

struct Closure {
  ClosureKind kind;
  /// Indicial exponent for Robin rows x d/dx w = mu w.
  double mu = 0.0;
  StencilRow row;
};

/// Inhomogeneous right-hand sides of the two closure rows (0 in normal runs;
/// manufactured-solution runs inject exact data).
struct ClosureData {
  double tip = 0.0;
  double outer = 0.0;
};

/// Discretized L_k = Delta_k + 1 for one Fourier mode, where
/// Delta_k = x^{-2}[(x d/dx)^2 + H (x d/dx) - k^2 / rho^2] near a tip and,
/// globally, Delta_k u = R^{-1}(R u')' - k^2 u / R^2.
///
/// Rows 3..N-4 use the conservative 4th-order form
/// (1 / (R x_s)) d_s((R / x_s) d_s u), which is symmetric in the weighted
/// inner product sum_j R_j x_s,j u_j v_j. Rows 1, 2, N-3, N-2 use 4th-order
/// one-sided non-conservative stencils. Rows 0 and N-1 hold the closures.
class ModeOperator {
public:
  int mode() const { return mode_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<StencilRow>& rows() const { return rows_; }
  const std::optional<Closure>& tip() const { return tip_; }
  const std::optional<Closure>& outer() const { return outer_; }
  bool closed() const { return tip_.has_value() && outer_.has_value(); }

  /// (Delta_k + 1) u on rows 1..N-2; rows 0 and N-1 hold the closure
  /// residuals (0 if the closures are not yet attached).
  std::vector<double> apply(std::span<const double> u) const;
  /// Delta_k u on rows 1..N-2 (boundary rows as in apply()).
  std::vector<double> apply_laplacian(std::span<const double> u) const;

  /// Residual of the tip closure row applied to u.
  double tip_residual(std::span<const double> u) const;

  /// Node weights m_j = R_j x_s,j making the interior rows symmetric.
  std::span<const double> symmetry_weights() const { return weights_; }

  /// Dense (N-2) x (N-2) matrix of L_k on the interior nodes after the
  /// homogeneous closures have been used to eliminate u_0 and u_{N-1};
  /// row-major. Requires both closures.
  std::vector<double> interior_matrix() const;
  /// Boundary values implied by the homogeneous closures for given interior values.
  std::pair<double, double> boundary_values(std::span<const double> interior) const;

private:
  friend ModeOperator assemble_mode_laplacian(const RadialGrid&, const geometry::SurfaceOfRevolution&, int);
  friend ModeOperator tip_closure(ModeOperator, Extension, const std::optional<mellin::WeightWindow>&);
  friend ModeOperator outer_closure(ModeOperator);

  int mode_ = 0;
  std::vector<StencilRow> rows_;
  std::vector<double> weights_;
  std::optional<Closure> tip_;
  std::optional<Closure> outer_;
  // Cached for closure construction.
  std::vector<double> x_;
  std::vector<double> dpsi_;
  double h_ = 0.0;
  double length_ = 0.0;
  double tip_rho_ = 1.0;
  std::optional<double> south_rho_;
  geometry::Topology topology_ = geometry::Topology::collar;
  geometry::OuterBoundary outer_bc_ = geometry::OuterBoundary::neumann;
};

/// Throws DegenerateMetricError if R <= 0 at any node.
ModeOperator assemble_mode_laplacian(const RadialGrid& grid, const geometry::SurfaceOfRevolution& surface, int k);

/// Attaches the tip row x d/dx u = mu_k u at x_min with mu_0 = 0 and
/// mu_k = k / rho(0). The minimal extension replaces the k = 0 row by
/// u(x_min) = 0 and is refused (PreconditionError) if `window` is empty.
ModeOperator tip_closure(ModeOperator op, Extension extension = Extension::chosen,
                         const std::optional<mellin::WeightWindow>& window = std::nullopt);

/// Attaches the row at the far end: the configured Dirichlet/Neumann condition
/// on a collar, or the south-pole Robin row on a closed surface.
ModeOperator outer_closure(ModeOperator op);

/// assemble + tip_closure + outer_closure.
ModeOperator build_mode_operator(const RadialGrid& grid, const geometry::SurfaceOfRevolution& surface, int k,
                                 Extension extension = Extension::chosen);

/// Factorization of the nested system used by implicit steps:
///   w - L u = 0            (rows 1..N-2) with the closures on u,
///   alpha u + tau (L w + c u) = f   (rows 1..N-2) with the closures on w.
/// alpha = 0, tau = 1, c = 0 solves L^2 u = f.
class NestedSolver {
public:
  NestedSolver(const ModeOperator& op, double alpha, double tau, double shift);

  /// f holds the right-hand side on rows 1..N-2 (entries 0 and N-1 ignored).
  /// Returns u; w is written to `w_out` if non-empty.
  std::vector<double> solve(std::span<const double> f, ClosureData u_data = {}, ClosureData w_data = {},
                            std::span<double> w_out = {}) const;

  std::size_t size() const { return n_; }

private:
  std::size_t n_;
  BandedLU lu_;
  // Equilibration factors of the evolution rows 1..N-2.
  std::vector<double> row_scale_;
};

struct SpectrumDiagnostics {
  std::size_t eigenvalue_count;
  /// min Re of the eigenvalues of (Delta_k + 1)^2 + c.
  double min_real_part;
  /// max |Im| / max(1, |Re|) over the eigenvalues of Delta_k + 1.
  double max_relative_imag;
  /// sup over eigenvalues mu and t > 0 of (t |mu|)^a exp(-t Re mu).
  double smoothing_sup;
  /// (a / e)^a, the value the sup takes for real positive spectra.
  double smoothing_expected;
  double exponent_a;
  double shift;
};

/// Eigen-decomposition of the closed operator on the interior nodes, in the
/// symmetric-weight similarity frame. Throws SolverError if the eigen-solver
/// fails to converge.
SpectrumDiagnostics spectrum_diagnostics(const ModeOperator& op, double shift, double a);

/// sup_{t > 0} (t |mu|)^a exp(-t Re mu) by golden-section search in log t.
double smoothing_sup(std::complex<double> mu, double a);

} // namespace conelab::disc
