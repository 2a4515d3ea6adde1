#pragma once

#include "conelab/disc_operator.hpp"
#include "conelab/field.hpp"
#include "conelab/geometry.hpp"

#include <functional>

namespace conelab::norms {

/// omega(x) = 1 on [0, inner], 0 on [outer, inf), quintic smoothstep between.
struct Cutoff {
  double inner;
  double outer;

  double operator()(double x) const;
};

/// The default cutoff for a collar of length r: inner = r/2, outer = r.
Cutoff default_cutoff(double collar_length);

struct MellinNormConfig {
  /// Integer smoothness 0, 1 or 2.
  int s = 0;
  double gamma = 0.0;
  double p = 2.0;
  Cutoff omega{0.5, 1.0};
  /// Cross-section dimension entering the tip weight x^{(n+1)/2 - gamma}.
  int n = 1;
};

/// Everything a discrete norm needs besides the field.
struct NormContext {
  const disc::RadialGrid& grid;
  const geometry::SurfaceOfRevolution& surface;
  const ThetaTransform& transform;
};

/// Discrete H^{s,gamma}_p norm:
///   ( sum_{k + a <= s} int |x^{(n+1)/2 - gamma} (x d/dx)^k d_theta^a (omega u)|^p rho dx/x dtheta
///   + sum_{k + a <= s} int |d_x^k d_theta^a ((1 - omega) u)|^p R dx dtheta )^{1/p}.
/// Radial integrals use the grid's Gregory weights, theta the trapezoid rule.
/// Throws UnsupportedError for s outside {0, 1, 2}.
double mellin_norm(const ModalField& u, const NormContext& ctx, const MellinNormConfig& cfg);

/// sup over collar nodes and angles of |u| x^{(n+1)/2 - gamma} / ||u||.
/// Returns +inf for a zero norm with a non-zero field and 0 for the zero field.
double pointwise_constant(const ModalField& u, const NormContext& ctx, const MellinNormConfig& cfg);

struct PointwiseBoundReport {
  double l_fit_coarse;
  double l_fit_fine;
  /// max(L_fine / L_coarse, L_coarse / L_fine).
  double drift;
  /// s > (n+1)/p; when false the verdict is reported but carries no meaning.
  bool applicable;
  bool pass;
};

/// Samples `field(x, theta)` on grids with N and 2N radial nodes and checks
/// that the pointwise constant is finite and drifts by less than 2x.
PointwiseBoundReport pointwise_bound_check(const std::function<double(double, double)>& field,
                                           const geometry::SurfaceOfRevolution& surface, const MellinNormConfig& cfg,
                                           int n_radial, int k_max, disc::XMinPolicy policy = {});

} // namespace conelab::norms
