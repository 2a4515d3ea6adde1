#include "conelab/disc_operator.hpp"

#include "conelab/errors.hpp"
#include "conelab/finite_difference.hpp"

#include <Eigen/Dense>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace conelab::disc {

using geometry::Topology;

namespace {

// Weights for the first and second sigma-derivatives at node `at` from nodes first..first+count-1.
struct LocalStencil {
  std::size_t first;
  std::vector<double> d1;
  std::vector<double> d2;
};

LocalStencil local_stencil(std::size_t at, std::size_t first, std::size_t count, double h) {
  std::vector<double> offsets(count);
  std::iota(offsets.begin(), offsets.end(), 0.0);
  const double z = static_cast<double>(at) - static_cast<double>(first);
  auto w = fd::fornberg_weights(z, offsets, 2);
  for (auto& v : w[1]) v /= h;
  for (auto& v : w[2]) v /= h * h;
  return {first, std::move(w[1]), std::move(w[2])};
}

// 4th-order staggered difference at sigma_{i+1/2} from u_{i-1}..u_{i+2}.
constexpr std::array<double, 4> kStaggered{1.0 / 24.0, -27.0 / 24.0, 27.0 / 24.0, -1.0 / 24.0};

} // namespace

double StencilRow::apply(std::span<const double> u) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    acc += coeffs[j] * u[first + j];
  }
  return acc;
}

std::string_view to_string(ClosureKind kind) {
  switch (kind) {
  case ClosureKind::tip_robin: return "tip-robin";
  case ClosureKind::tip_dirichlet: return "tip-dirichlet";
  case ClosureKind::outer_dirichlet: return "outer-dirichlet";
  case ClosureKind::outer_neumann: return "outer-neumann";
  case ClosureKind::south_robin: return "south-robin";
  }
  return "unknown";
}

double RadialGrid::psi(double x) const {
  if (topology_ == Topology::collar) {
    return std::log(x);
  }
  return std::log(x) - std::log(length_ - x) + x / blend_;
}

double RadialGrid::dpsi(double x) const {
  if (topology_ == Topology::collar) {
    return 1.0 / x;
  }
  return 1.0 / x + 1.0 / (length_ - x) + 1.0 / blend_;
}

double RadialGrid::d2psi(double x) const {
  if (topology_ == Topology::collar) {
    return -1.0 / (x * x);
  }
  const double y = length_ - x;
  return -1.0 / (x * x) + 1.0 / (y * y);
}

double RadialGrid::sigma_of(double x) const {
  return psi(x);
}

double RadialGrid::x_of(double sigma) const {
  if (topology_ == Topology::collar) {
    return std::exp(sigma);
  }
  // psi is strictly increasing on (0, L): safeguarded Newton.
  double lo = 0.0;
  double hi = length_;
  double x = 0.5 * length_;
  for (int it = 0; it < 200; ++it) {
    const double f = psi(x) - sigma;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double next = x - f / dpsi(x);
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

std::vector<double> RadialGrid::mellin_weights(const geometry::SurfaceOfRevolution& surface) const {
  std::vector<double> w(size());
  for (std::size_t j = 0; j < size(); ++j) {
    w[j] = dx_weights_[j] * surface.radius(x_[j]) / (x_[j] * x_[j]);
  }
  return w;
}

RadialGrid build_grid(const geometry::SurfaceOfRevolution& surface, int n, XMinPolicy policy) {
  if (n < 16) {
    throw PreconditionError(fmt::format("radial grid needs N >= 16, got {}", n));
  }
  RadialGrid grid;
  grid.topology_ = surface.topology();
  grid.length_ = surface.meridian_length();
  grid.blend_ = surface.collar_length();
  const double x_min = policy.relative ? policy.value * surface.collar_length() : policy.value;
  const double x_max = grid.topology_ == Topology::collar ? grid.length_ : grid.length_ - x_min;
  if (!(x_min > 0.0) || !(x_min < x_max)) {
    throw PreconditionError(fmt::format("invalid radial extent: x_min = {}, x_max = {}", x_min, x_max));
  }
  const auto count = static_cast<std::size_t>(n);
  const double s0 = grid.psi(x_min);
  const double s1 = grid.psi(x_max);
  grid.h_ = (s1 - s0) / static_cast<double>(n - 1);
  grid.sigma_.resize(count);
  grid.x_.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    grid.sigma_[j] = s0 + grid.h_ * static_cast<double>(j);
    grid.x_[j] = grid.x_of(grid.sigma_[j]);
  }
  grid.x_.front() = x_min;
  grid.x_.back() = x_max;
  if (grid.topology_ == Topology::closed) {
    for (std::size_t j = 0; j < count / 2; ++j) {
      grid.x_[count - 1 - j] = grid.length_ - grid.x_[j];
    }
  }
  grid.dx_.resize(count);
  grid.d2x_.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double dx = 1.0 / grid.dpsi(grid.x_[j]);
    grid.dx_[j] = dx;
    grid.d2x_[j] = -grid.d2psi(grid.x_[j]) * dx * dx * dx;
  }
  grid.half_x_.resize(count - 1);
  grid.half_dx_.resize(count - 1);
  for (std::size_t j = 0; j + 1 < count; ++j) {
    grid.half_x_[j] = grid.x_of(s0 + grid.h_ * (static_cast<double>(j) + 0.5));
    grid.half_dx_[j] = 1.0 / grid.dpsi(grid.half_x_[j]);
  }
  grid.dx_weights_ = fd::gregory_weights(count, grid.h_);
  for (std::size_t j = 0; j < count; ++j) {
    grid.dx_weights_[j] *= grid.dx_[j];
  }
  return grid;
}

ModeOperator assemble_mode_laplacian(const RadialGrid& grid, const geometry::SurfaceOfRevolution& surface, int k) {
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  const auto x = grid.x();
  const auto dx = grid.dx();
  const auto d2x = grid.d2x();
  const double k2 = static_cast<double>(k) * k;

  ModeOperator op;
  op.mode_ = k;
  op.h_ = h;
  op.length_ = grid.meridian_length();
  op.topology_ = surface.topology();
  op.outer_bc_ = surface.outer_boundary();
  op.tip_rho_ = surface.north().tip_rho();
  if (surface.south()) {
    op.south_rho_ = surface.south()->tip_rho();
  }
  op.x_.assign(x.begin(), x.end());
  op.dpsi_.resize(n);
  op.weights_.resize(n);
  op.rows_.resize(n);

  std::vector<double> radius(n), dradius(n), half_a(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    radius[j] = surface.radius(x[j]);
    dradius[j] = surface.dradius(x[j]);
    if (!(radius[j] > 0.0)) {
      throw DegenerateMetricError(fmt::format("metric degenerates at x = {} (R = {})", x[j], radius[j]));
    }
    op.dpsi_[j] = 1.0 / dx[j];
    op.weights_[j] = radius[j] * dx[j];
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double r = surface.radius(grid.half_x()[j]);
    if (!(r > 0.0)) {
      throw DegenerateMetricError(fmt::format("metric degenerates at x = {}", grid.half_x()[j]));
    }
    half_a[j] = r / grid.half_dx()[j];
  }

  for (std::size_t j = 3; j + 4 <= n; ++j) {
    StencilRow row{j - 3, std::vector<double>(7, 0.0)};
    // Halves j-3/2, j-1/2, j+1/2, j+3/2 correspond to half indices j-2..j+1.
    for (int q = 0; q < 4; ++q) {
      const std::size_t half = j - 2 + static_cast<std::size_t>(q);
      const double outer = kStaggered[q] * half_a[half];
      for (int r = 0; r < 4; ++r) {
        const std::size_t col = half - 1 + static_cast<std::size_t>(r);
        row.coeffs[col - row.first] += outer * kStaggered[r];
      }
    }
    const double scale = 1.0 / (op.weights_[j] * h * h);
    for (auto& c : row.coeffs) c *= scale;
    row.coeffs[3] -= k2 / (radius[j] * radius[j]);
    op.rows_[j] = std::move(row);
  }

  auto non_conservative = [&](std::size_t j, std::size_t first, std::size_t count) {
    const auto st = local_stencil(j, first, count, h);
    const double c2 = 1.0 / (dx[j] * dx[j]);
    const double c1 = dradius[j] / (radius[j] * dx[j]) - d2x[j] / (dx[j] * dx[j] * dx[j]);
    StencilRow row{first, std::vector<double>(count, 0.0)};
    for (std::size_t i = 0; i < count; ++i) {
      row.coeffs[i] = c2 * st.d2[i] + c1 * st.d1[i];
    }
    row.coeffs[j - first] -= k2 / (radius[j] * radius[j]);
    op.rows_[j] = std::move(row);
  };
  non_conservative(1, 0, 6);
  non_conservative(2, 0, 5);
  non_conservative(n - 3, n - 5, 5);
  non_conservative(n - 2, n - 6, 6);
  return op;
}

ModeOperator tip_closure(ModeOperator op, Extension extension, const std::optional<mellin::WeightWindow>& window) {
  if (extension == Extension::minimal && window && window->empty()) {
    throw PreconditionError("minimal extension requested with an empty weight window");
  }
  const int k = op.mode_;
  Closure closure{};
  if (extension == Extension::minimal && k == 0) {
    closure.kind = ClosureKind::tip_dirichlet;
    closure.row = {0, {1.0}};
  } else {
    closure.kind = ClosureKind::tip_robin;
    closure.mu = k == 0 ? 0.0 : static_cast<double>(std::abs(k)) / op.tip_rho_;
    const auto st = local_stencil(0, 0, 5, op.h_);
    const double xd = op.x_[0] * op.dpsi_[0];
    closure.row = {0, std::vector<double>(5)};
    for (std::size_t i = 0; i < 5; ++i) {
      closure.row.coeffs[i] = xd * st.d1[i];
    }
    closure.row.coeffs[0] -= closure.mu;
  }
  op.tip_ = std::move(closure);
  return op;
}

ModeOperator outer_closure(ModeOperator op) {
  const std::size_t n = op.x_.size();
  Closure closure{};
  if (op.topology_ == Topology::closed) {
    closure.kind = ClosureKind::south_robin;
    const int k = std::abs(op.mode_);
    closure.mu = k == 0 ? 0.0 : static_cast<double>(k) / op.south_rho_.value_or(1.0);
    const auto st = local_stencil(n - 1, n - 5, 5, op.h_);
    // y d/dy with y = L - x is -(L - x) d/dx.
    const double yd = -(op.length_ - op.x_[n - 1]) * op.dpsi_[n - 1];
    closure.row = {n - 5, std::vector<double>(5)};
    for (std::size_t i = 0; i < 5; ++i) {
      closure.row.coeffs[i] = yd * st.d1[i];
    }
    closure.row.coeffs[4] -= closure.mu;
  } else if (op.outer_bc_ == geometry::OuterBoundary::dirichlet) {
    closure.kind = ClosureKind::outer_dirichlet;
    closure.row = {n - 1, {1.0}};
  } else {
    closure.kind = ClosureKind::outer_neumann;
    const auto st = local_stencil(n - 1, n - 5, 5, op.h_);
    closure.row = {n - 5, std::vector<double>(5)};
    for (std::size_t i = 0; i < 5; ++i) {
      closure.row.coeffs[i] = op.dpsi_[n - 1] * st.d1[i];
    }
  }
  op.outer_ = std::move(closure);
  return op;
}

ModeOperator build_mode_operator(const RadialGrid& grid, const geometry::SurfaceOfRevolution& surface, int k,
                                 Extension extension) {
  return outer_closure(tip_closure(assemble_mode_laplacian(grid, surface, k), extension));
}

std::vector<double> ModeOperator::apply_laplacian(std::span<const double> u) const {
  const std::size_t n = size();
  if (u.size() != n) {
    throw PreconditionError("ModeOperator::apply: field length does not match the grid");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out[j] = rows_[j].apply(u);
  }
  if (tip_) out[0] = tip_->row.apply(u);
  if (outer_) out[n - 1] = outer_->row.apply(u);
  return out;
}

std::vector<double> ModeOperator::apply(std::span<const double> u) const {
  auto out = apply_laplacian(u);
  for (std::size_t j = 1; j + 1 < size(); ++j) {
    out[j] += u[j];
  }
  return out;
}

double ModeOperator::tip_residual(std::span<const double> u) const {
  if (!tip_) {
    throw PreconditionError("tip closure not attached");
  }
  return tip_->row.apply(u);
}

std::pair<double, double> ModeOperator::boundary_values(std::span<const double> interior) const {
  if (!closed()) {
    throw PreconditionError("boundary_values needs both closures");
  }
  const std::size_t n = size();
  std::vector<double> u(n, 0.0);
  std::copy(interior.begin(), interior.end(), u.begin() + 1);
  // Each closure row touches only one boundary node.
  const auto& t = tip_->row;
  double tip_sum = 0.0;
  for (std::size_t i = 1; i < t.coeffs.size(); ++i) tip_sum += t.coeffs[i] * u[t.first + i];
  const double u0 = -tip_sum / t.coeffs[0];
  const auto& o = outer_->row;
  double outer_sum = 0.0;
  for (std::size_t i = 0; i + 1 < o.coeffs.size(); ++i) outer_sum += o.coeffs[i] * u[o.first + i];
  const double un = -outer_sum / o.coeffs.back();
  return {u0, un};
}

std::vector<double> ModeOperator::interior_matrix() const {
  if (!closed()) {
    throw PreconditionError("interior_matrix needs both closures");
  }
  const std::size_t n = size();
  const std::size_t m = n - 2;
  // u_0 = sum_j e0[j] u_j and u_{n-1} = sum_j en[j] u_j over interior j.
  std::vector<double> e0(n, 0.0), en(n, 0.0);
  const auto& t = tip_->row;
  for (std::size_t i = 1; i < t.coeffs.size(); ++i) e0[t.first + i] = -t.coeffs[i] / t.coeffs[0];
  const auto& o = outer_->row;
  for (std::size_t i = 0; i + 1 < o.coeffs.size(); ++i) en[o.first + i] = -o.coeffs[i] / o.coeffs.back();

  std::vector<double> dense(m * m, 0.0);
  for (std::size_t r = 1; r + 1 < n; ++r) {
    const auto& row = rows_[r];
    double* out = dense.data() + (r - 1) * m;
    for (std::size_t i = 0; i < row.coeffs.size(); ++i) {
      const std::size_t col = row.first + i;
      const double c = row.coeffs[i];
      if (col == 0) {
        for (std::size_t j = 1; j + 1 < n; ++j) out[j - 1] += c * e0[j];
      } else if (col == n - 1) {
        for (std::size_t j = 1; j + 1 < n; ++j) out[j - 1] += c * en[j];
      } else {
        out[col - 1] += c;
      }
    }
    out[r - 1] += 1.0;
  }
  return dense;
}

NestedSolver::NestedSolver(const ModeOperator& op, double alpha, double tau, double shift)
    : n_(op.size()), lu_(1, 0, 0) {
  if (!op.closed()) {
    throw PreconditionError("NestedSolver needs an operator with both closures");
  }
  const std::size_t n = n_;
  // Interleaved unknowns z_{2j} = u_j, z_{2j+1} = w_j.
  struct Entry {
    std::size_t row;
    std::size_t col;
    double value;
  };
  std::vector<Entry> entries;
  auto add_closure = [&](const StencilRow& row, std::size_t at, std::size_t component) {
    for (std::size_t i = 0; i < row.coeffs.size(); ++i) {
      entries.push_back({2 * at + component, 2 * (row.first + i) + component, row.coeffs[i]});
    }
  };
  add_closure(op.tip()->row, 0, 0);
  add_closure(op.tip()->row, 0, 1);
  add_closure(op.outer()->row, n - 1, 0);
  add_closure(op.outer()->row, n - 1, 1);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const auto& row = op.rows()[j];
    double scale_u = 0.0;
    double scale_w = std::abs(alpha + tau * shift);
    for (double c : row.coeffs) {
      scale_u = std::max(scale_u, std::abs(c));
      scale_w = std::max(scale_w, std::abs(tau * c));
    }
    scale_u = scale_u > 0.0 ? 1.0 / scale_u : 1.0;
    scale_w = scale_w > 0.0 ? 1.0 / scale_w : 1.0;
    // w_j - (L u)_j = 0
    entries.push_back({2 * j, 2 * j + 1, scale_u});
    entries.push_back({2 * j, 2 * j, -scale_u});
    for (std::size_t i = 0; i < row.coeffs.size(); ++i) {
      entries.push_back({2 * j, 2 * (row.first + i), -scale_u * row.coeffs[i]});
    }
    // alpha u_j + tau ((L w)_j + c u_j) = f_j
    entries.push_back({2 * j + 1, 2 * j, scale_w * (alpha + tau * shift)});
    entries.push_back({2 * j + 1, 2 * j + 1, scale_w * tau});
    for (std::size_t i = 0; i < row.coeffs.size(); ++i) {
      entries.push_back({2 * j + 1, 2 * (row.first + i) + 1, scale_w * tau * row.coeffs[i]});
    }
    row_scale_.push_back(scale_w);
  }
  long kl = 0;
  long ku = 0;
  for (const auto& e : entries) {
    const long off = static_cast<long>(e.row) - static_cast<long>(e.col);
    kl = std::max(kl, off);
    ku = std::max(ku, -off);
  }
  lu_ = BandedLU(2 * n, static_cast<int>(kl), static_cast<int>(ku));
  for (const auto& e : entries) {
    lu_.add(e.row, e.col, e.value);
  }
  lu_.factorize();
}

std::vector<double> NestedSolver::solve(std::span<const double> f, ClosureData u_data, ClosureData w_data,
                                        std::span<double> w_out) const {
  const std::size_t n = n_;
  if (f.size() != n) {
    throw PreconditionError("NestedSolver::solve: right-hand side has the wrong length");
  }
  std::vector<double> z(2 * n, 0.0);
  z[0] = u_data.tip;
  z[1] = w_data.tip;
  z[2 * (n - 1)] = u_data.outer;
  z[2 * (n - 1) + 1] = w_data.outer;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    z[2 * j + 1] = row_scale_[j - 1] * f[j];
  }
  lu_.solve(z);
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) {
    u[j] = z[2 * j];
  }
  if (!w_out.empty()) {
    for (std::size_t j = 0; j < n; ++j) {
      w_out[j] = z[2 * j + 1];
    }
  }
  return u;
}

double smoothing_sup(std::complex<double> mu, double a) {
  const double re = mu.real();
  const double mag = std::abs(mu);
  if (re < 0.0 || (re == 0.0 && a > 0.0 && mag > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  if (mag == 0.0) {
    return a == 0.0 ? 1.0 : 0.0;
  }
  if (a == 0.0) {
    // Supremum approached as t -> 0+.
    return std::exp(-std::numeric_limits<double>::min() * re);
  }
  // log of the objective in s = log t is concave: a (s + log|mu|) - e^s Re mu.
  auto g = [&](double s) { return a * (s + std::log(mag)) - std::exp(s) * re; };
  const double centre = std::log(a / re);
  double lo = centre - 20.0;
  double hi = centre + 20.0;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double gc = g(c);
  double gd = g(d);
  while (hi - lo > 1e-10) {
    if (gc > gd) {
      hi = d;
      d = c;
      gd = gc;
      c = hi - inv_phi * (hi - lo);
      gc = g(c);
    } else {
      lo = c;
      c = d;
      gc = gd;
      d = lo + inv_phi * (hi - lo);
      gd = g(d);
    }
  }
  return std::exp(g(0.5 * (lo + hi)));
}

SpectrumDiagnostics spectrum_diagnostics(const ModeOperator& op, double shift, double a) {
  if (shift < 0.0 || a < 0.0) {
    throw PreconditionError("spectrum_diagnostics: shift and exponent must be non-negative");
  }
  const std::size_t m = op.size() - 2;
  const auto dense = op.interior_matrix();
  const auto weights = op.symmetry_weights();
  Eigen::MatrixXd mat(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    const double si = std::sqrt(weights[i + 1]);
    for (std::size_t j = 0; j < m; ++j) {
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          si * dense[i * m + j] / std::sqrt(weights[j + 1]);
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, false);
  if (solver.info() != Eigen::Success) {
    throw SolverError(fmt::format("eigen-solver failed on mode {}", op.mode()));
  }
  SpectrumDiagnostics diag{};
  diag.eigenvalue_count = m;
  diag.exponent_a = a;
  diag.shift = shift;
  diag.smoothing_expected = a == 0.0 ? 1.0 : std::pow(a / std::exp(1.0), a);
  diag.min_real_part = std::numeric_limits<double>::infinity();
  diag.smoothing_sup = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const std::complex<double> lambda = solver.eigenvalues()(i);
    const std::complex<double> mu = lambda * lambda + shift;
    diag.min_real_part = std::min(diag.min_real_part, mu.real());
    diag.max_relative_imag =
        std::max(diag.max_relative_imag, std::abs(lambda.imag()) / std::max(1.0, std::abs(lambda.real())));
    diag.smoothing_sup = std::max(diag.smoothing_sup, smoothing_sup(mu, a));
  }
  return diag;
}

} // namespace conelab::disc
