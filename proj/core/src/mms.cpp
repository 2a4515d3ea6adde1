#include "conelab/mms.hpp"

#include "conelab/asymptotics_fit.hpp"
#include "conelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace conelab::dyn {

namespace {

using Terms = std::vector<std::pair<double, double>>;

Terms apply_cone_operator(const Terms& terms, double mu) {
  Terms out;
  auto add = [&](double p, double c) {
    for (auto& [q, d] : out) {
      if (std::abs(q - p) < 1e-12) {
        d += c;
        return;
      }
    }
    out.emplace_back(p, c);
  };
  for (const auto& [p, c] : terms) {
    add(p, c);
    const double factor = p * p - mu * mu;
    if (factor != 0.0) add(p - 2.0, c * factor);
  }
  return out;
}

double evaluate_terms(const Terms& terms, double x) {
  double v = 0.0;
  for (const auto& [p, c] : terms) v += c * std::pow(x, p);
  return v;
}

std::complex<double> apply_row(const disc::StencilRow& row, std::span<const std::complex<double>> v) {
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < row.coeffs.size(); ++i) acc += row.coeffs[i] * v[row.first + i];
  return acc;
}

} // namespace

ExactSample SphereZonalSolution::sample(const disc::RadialGrid& grid, int k_max, double t) const {
  const std::size_t n = grid.size();
  ExactSample s{ModalField(n, k_max), ModalField(n, k_max), ModalField(n, k_max), ModalField(n, k_max)};
  const double decay = std::exp(-t);
  const double eig = 1.0 - 2.0 / (radius_ * radius_);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = decay * std::cos(grid.x()[j] / radius_);
    s.u.at(0, j) = u;
    s.u_t.at(0, j) = -u;
    s.lu.at(0, j) = eig * u;
    s.l2u.at(0, j) = eig * eig * u;
  }
  return s;
}

ExactSample ConstantSolution::sample(const disc::RadialGrid& grid, int k_max, double) const {
  const std::size_t n = grid.size();
  ExactSample s{ModalField(n, k_max), ModalField(n, k_max), ModalField(n, k_max), ModalField(n, k_max)};
  for (std::size_t j = 0; j < n; ++j) {
    s.u.at(0, j) = value_;
    s.lu.at(0, j) = value_;
    s.l2u.at(0, j) = value_;
  }
  return s;
}

ExactSample ConePowerSolution::sample(const disc::RadialGrid& grid, int k_max, double t) const {
  if (mode_ > k_max) {
    throw PreconditionError("manufactured mode exceeds k_max");
  }
  const std::size_t n = grid.size();
  ExactSample s{ModalField(n, k_max), ModalField(n, k_max), ModalField(n, k_max), ModalField(n, k_max)};
  const double mu = static_cast<double>(mode_) / rho0_;
  const Terms lu = apply_cone_operator(terms_, mu);
  const Terms l2u = apply_cone_operator(lu, mu);
  // cos(k theta) splits evenly between modes k and -k.
  const double scale = std::exp(-t) * (mode_ == 0 ? 1.0 : 0.5);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x()[j];
    const double u = scale * evaluate_terms(terms_, x);
    s.u.at(mode_, j) = u;
    s.u_t.at(mode_, j) = -u;
    s.lu.at(mode_, j) = scale * evaluate_terms(lu, x);
    s.l2u.at(mode_, j) = scale * evaluate_terms(l2u, x);
  }
  return s;
}

ManufacturedForcing::ManufacturedForcing(std::shared_ptr<const ManufacturedSolution> solution,
                                         const disc::RadialGrid& grid, int k_max, Nonlinearity nonlinearity,
                                         std::size_t theta_points)
    : solution_(std::move(solution)), grid_(grid), k_max_(k_max), nl_(std::move(nonlinearity)),
      transform_(std::make_shared<ThetaTransform>(grid.size(), k_max, theta_points)) {}

ForcingSample ManufacturedForcing::evaluate(double t, const std::vector<disc::ModeOperator>& ops) const {
  const auto exact = solution_->sample(grid_, k_max_, t);
  const std::size_t n = grid_.size();
  ForcingSample out{ModalField(n, k_max_), {}, {}};
  ModalField f(n, k_max_);
  if (!nl_.is_zero()) {
    auto phys = transform_->to_physical(exact.u);
    for (auto& v : phys.data()) v = nl_(t, v);
    f = transform_->to_modal(phys);
  }
  for (int k = 0; k <= k_max_; ++k) {
    for (std::size_t j = 0; j < n; ++j) {
      out.g.at(k, j) = exact.u_t.at(k, j) + exact.l2u.at(k, j) - f.at(k, j);
    }
    const auto& op = ops[static_cast<std::size_t>(k)];
    out.u_data.push_back({apply_row(op.tip()->row, exact.u.mode(k)), apply_row(op.outer()->row, exact.u.mode(k))});
    out.w_data.push_back({apply_row(op.tip()->row, exact.lu.mode(k)), apply_row(op.outer()->row, exact.lu.mode(k))});
  }
  return out;
}

MmsRow mms_single(std::shared_ptr<const ManufacturedSolution> solution, const geometry::SurfaceOfRevolution& surface,
                  const Nonlinearity& nonlinearity, SolverConfig cfg, int n_radial, int k_max, double dt,
                  double t_final) {
  cfg.dt = dt;
  cfg.t_final = t_final;
  // Manufactured runs never stop on the monitor.
  cfg.threshold = {std::numeric_limits<double>::infinity(), 0.0};
  const auto grid = disc::build_grid(surface, n_radial);
  const std::size_t m =
      cfg.theta_points > 0 ? cfg.theta_points : dealiased_theta_points(k_max, std::max(nonlinearity.degree(), 1));
  cfg.theta_points = m;
  auto forcing = std::make_shared<ManufacturedForcing>(solution, grid, k_max, nonlinearity, m);
  const Integrator integrator(grid, surface, k_max, nonlinearity, cfg, forcing);
  auto state = integrator.initialize(solution->sample(grid, k_max, 0.0).u);
  integrator.run(state);
  if (state.halted()) {
    throw SolverError(std::string("manufactured run halted: ") + state.halt_detail);
  }
  const auto exact = solution->sample(grid, k_max, state.t);
  ModalField diff = state.u;
  for (std::size_t i = 0; i < diff.data().size(); ++i) diff.data()[i] -= exact.u.data()[i];
  MmsRow row{"", n_radial, dt, 0.0, 0.0, 0.0};
  row.linf_error = integrator.transform().to_physical(diff).max_abs();
  row.norm_error = integrator.monitor_norm(diff);
  for (int k = 0; k <= k_max; ++k) {
    double exact_max = 0.0;
    for (const auto& v : exact.u.mode(k)) exact_max = std::max(exact_max, std::abs(v));
    if (exact_max > 0.0) continue;
    for (const auto& v : state.u.mode(k)) row.spurious_mode_max = std::max(row.spurious_mode_max, std::abs(v));
  }
  return row;
}

MmsTable mms_run(std::shared_ptr<const ManufacturedSolution> solution, const geometry::SurfaceOfRevolution& surface,
                 const Nonlinearity& nonlinearity, const SolverConfig& cfg, const MmsLadder& ladder) {
  MmsTable table{solution->name(), {}, 0.0, 0.0, 0.0};
  std::vector<double> lx, ly;
  for (int n : ladder.n_radial) {
    auto row = mms_single(solution, surface, nonlinearity, cfg, n, ladder.k_max, ladder.spatial_dt,
                          ladder.spatial_t_final);
    row.ladder = "spatial";
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(row.linf_error));
    table.spurious_mode_max = std::max(table.spurious_mode_max, row.spurious_mode_max);
    table.rows.push_back(row);
  }
  std::vector<double> tx, ty;
  for (double dt : ladder.dts) {
    auto row = mms_single(solution, surface, nonlinearity, cfg, ladder.temporal_n, ladder.k_max, dt,
                          ladder.temporal_t_final);
    row.ladder = "temporal";
    tx.push_back(std::log(dt));
    ty.push_back(std::log(row.linf_error));
    table.spurious_mode_max = std::max(table.spurious_mode_max, row.spurious_mode_max);
    table.rows.push_back(row);
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
  };
  table.spatial_order = lx.size() >= 2 && finite(ly) ? -fit::fit_line(lx, ly).slope : 0.0;
  table.temporal_order = tx.size() >= 2 && finite(ty) ? fit::fit_line(tx, ty).slope : 0.0;
  return table;
}

} // namespace conelab::dyn
