#include "conelab/mellin_norms.hpp"

#include "conelab/errors.hpp"
#include "conelab/finite_difference.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace conelab::norms {

namespace {

using cvec = std::vector<std::complex<double>>;

// d/dsigma of a complex radial profile.
cvec sigma_derivative(std::span<const std::complex<double>> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> re(n), im(n);
  for (std::size_t j = 0; j < n; ++j) {
    re[j] = f[j].real();
    im[j] = f[j].imag();
  }
  const auto dre = fd::derivative_uniform(re, h);
  const auto dim = fd::derivative_uniform(im, h);
  cvec out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = {dre[j], dim[j]};
  return out;
}

// Applies scale_j * d/dsigma to every mode.
ModalField radial_derivative(const ModalField& u, std::span<const double> scale, double h) {
  ModalField out(u.radial_size(), u.k_max());
  for (int k = 0; k <= u.k_max(); ++k) {
    const auto d = sigma_derivative(u.mode(k), h);
    auto dst = out.mode(k);
    for (std::size_t j = 0; j < d.size(); ++j) dst[j] = scale[j] * d[j];
  }
  return out;
}

ModalField theta_derivative(const ModalField& u) {
  ModalField out(u.radial_size(), u.k_max());
  for (int k = 0; k <= u.k_max(); ++k) {
    const std::complex<double> factor(0.0, static_cast<double>(k));
    auto src = u.mode(k);
    auto dst = out.mode(k);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] = factor * src[j];
  }
  return out;
}

// All (k, a) derivatives with k + a <= s, where the radial one is scale * d/dsigma.
std::vector<ModalField> derivative_family(const ModalField& f, int s, std::span<const double> scale, double h) {
  std::vector<ModalField> out{f};
  if (s >= 1) {
    const auto dr = radial_derivative(f, scale, h);
    out.push_back(dr);
    out.push_back(theta_derivative(f));
    if (s >= 2) {
      out.push_back(radial_derivative(dr, scale, h));
      out.push_back(theta_derivative(dr));
      out.push_back(theta_derivative(theta_derivative(f)));
    }
  }
  return out;
}

double weighted_sum(const std::vector<ModalField>& family, const ThetaTransform& transform,
                    std::span<const double> radial_weights, double p) {
  const double dtheta = 2.0 * std::numbers::pi / static_cast<double>(transform.theta_size());
  double total = 0.0;
  for (const auto& term : family) {
    const auto phys = transform.to_physical(term);
    for (std::size_t j = 0; j < phys.radial_size(); ++j) {
      if (radial_weights[j] == 0.0) continue;
      double shell = 0.0;
      for (double v : phys.shell(j)) shell += std::pow(std::abs(v), p);
      total += radial_weights[j] * shell * dtheta;
    }
  }
  return total;
}

void check_config(const MellinNormConfig& cfg) {
  if (cfg.s < 0 || cfg.s > 2) {
    throw UnsupportedError(fmt::format("Mellin norms are implemented for s in {{0, 1, 2}}, got s = {}", cfg.s));
  }
  if (!(cfg.p > 1.0) || !std::isfinite(cfg.p)) {
    throw PreconditionError(fmt::format("norm exponent p must lie in (1, inf), got {}", cfg.p));
  }
  if (!(cfg.omega.inner > 0.0) || !(cfg.omega.inner < cfg.omega.outer)) {
    throw PreconditionError("cutoff needs 0 < inner < outer");
  }
}

} // namespace

double Cutoff::operator()(double x) const {
  if (x <= inner) return 1.0;
  if (x >= outer) return 0.0;
  const double t = (x - inner) / (outer - inner);
  return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

Cutoff default_cutoff(double collar_length) {
  return {0.5 * collar_length, collar_length};
}

double mellin_norm(const ModalField& u, const NormContext& ctx, const MellinNormConfig& cfg) {
  check_config(cfg);
  const auto& grid = ctx.grid;
  const std::size_t n = grid.size();
  if (u.radial_size() != n) {
    throw PreconditionError("mellin_norm: field does not live on this grid");
  }
  const auto x = grid.x();
  const auto dx = grid.dx();
  const auto w = grid.dx_weights();
  const double h = grid.spacing();

  ModalField tip_part(n, u.k_max());
  ModalField far_part(n, u.k_max());
  std::vector<double> mellin_scale(n), plain_scale(n), mellin_w(n), plain_w(n);
  const double tip_power = cfg.p * (0.5 * (cfg.n + 1) - cfg.gamma);
  for (std::size_t j = 0; j < n; ++j) {
    const double om = cfg.omega(x[j]);
    for (int k = 0; k <= u.k_max(); ++k) {
      tip_part.at(k, j) = om * u.at(k, j);
      far_part.at(k, j) = (1.0 - om) * u.at(k, j);
    }
    mellin_scale[j] = x[j] / dx[j];
    plain_scale[j] = 1.0 / dx[j];
    const double radius = ctx.surface.radius(x[j]);
    mellin_w[j] = w[j] * radius / (x[j] * x[j]) * std::pow(x[j], tip_power);
    plain_w[j] = w[j] * radius;
  }
  const double total = weighted_sum(derivative_family(tip_part, cfg.s, mellin_scale, h), ctx.transform, mellin_w,
                                    cfg.p) +
                       weighted_sum(derivative_family(far_part, cfg.s, plain_scale, h), ctx.transform, plain_w, cfg.p);
  return std::pow(total, 1.0 / cfg.p);
}

double pointwise_constant(const ModalField& u, const NormContext& ctx, const MellinNormConfig& cfg) {
  const double norm = mellin_norm(u, ctx, cfg);
  const auto phys = ctx.transform.to_physical(u);
  const auto x = ctx.grid.x();
  const double collar = ctx.surface.collar_length();
  const double power = 0.5 * (cfg.n + 1) - cfg.gamma;
  double sup = 0.0;
  for (std::size_t j = 0; j < x.size() && x[j] <= collar; ++j) {
    double shell = 0.0;
    for (double v : phys.shell(j)) shell = std::max(shell, std::abs(v));
    sup = std::max(sup, shell * std::pow(x[j], power));
  }
  if (sup == 0.0) return 0.0;
  if (norm == 0.0) return std::numeric_limits<double>::infinity();
  return sup / norm;
}

PointwiseBoundReport pointwise_bound_check(const std::function<double(double, double)>& field,
                                           const geometry::SurfaceOfRevolution& surface, const MellinNormConfig& cfg,
                                           int n_radial, int k_max, disc::XMinPolicy policy) {
  check_config(cfg);
  auto evaluate = [&](int n) {
    const auto grid = disc::build_grid(surface, n, policy);
    const std::size_t m = dealiased_theta_points(k_max, 1);
    const ThetaTransform transform(grid.size(), k_max, m);
    PhysicalField phys(grid.size(), m);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      for (std::size_t l = 0; l < m; ++l) {
        phys.at(j, l) = field(grid.x()[j], 2.0 * std::numbers::pi * static_cast<double>(l) / static_cast<double>(m));
      }
    }
    const auto modal = transform.to_modal(phys);
    return pointwise_constant(modal, NormContext{grid, surface, transform}, cfg);
  };
  PointwiseBoundReport report{};
  report.l_fit_coarse = evaluate(n_radial);
  report.l_fit_fine = evaluate(2 * n_radial);
  report.applicable = cfg.s > (cfg.n + 1) / cfg.p;
  const bool finite = std::isfinite(report.l_fit_coarse) && std::isfinite(report.l_fit_fine) &&
                      report.l_fit_coarse > 0.0 && report.l_fit_fine > 0.0;
  report.drift = finite ? std::max(report.l_fit_fine / report.l_fit_coarse, report.l_fit_coarse / report.l_fit_fine)
                        : std::numeric_limits<double>::infinity();
  report.pass = finite && report.drift < 2.0;
  return report;
}

} // namespace conelab::norms
