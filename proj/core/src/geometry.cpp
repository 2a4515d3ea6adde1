#include "conelab/geometry.hpp"

#include "conelab/errors.hpp"
#include "conelab/finite_difference.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace conelab::geometry {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Quintic smoothstep and its derivative, clamped to [0, 1].
double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smoothstep_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = t * (1.0 - t);
  return 30.0 * s * s;
}

class ConstantCone final : public WarpProfile::Evaluator {
public:
  explicit ConstantCone(double rho0) : rho0_(rho0) {}
  double rho(double) const override { return rho0_; }
  double drho(double) const override { return 0.0; }

private:
  double rho0_;
};

class RoundSphere final : public WarpProfile::Evaluator {
public:
  explicit RoundSphere(double radius) : radius_(radius) {}

  double rho(double x) const override {
    const double t = x / radius_;
    if (std::abs(t) < 1e-4) {
      const double t2 = t * t;
      return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
  }

  // d/dx [sin(t)/t] = (t cos t - sin t) / (R t^2)
  double drho(double x) const override {
    const double t = x / radius_;
    if (std::abs(t) < 1e-2) {
      const double t2 = t * t;
      return (-t / 3.0 + t * t2 / 30.0 - t * t2 * t2 / 840.0) / radius_;
    }
    return (t * std::cos(t) - std::sin(t)) / (t * t * radius_);
  }

private:
  double radius_;
};

// Meridian (a sin phi, c cos phi); x is arc length from the pole phi = 0.
class Spheroid final : public WarpProfile::Evaluator {
public:
  Spheroid(double a, double c) : a_(a), c_(c), pole_curvature_(c * c / (a * a * a * a)) {}

  double speed(double phi) const {
    const double s = std::sin(phi);
    const double co = std::cos(phi);
    return std::sqrt(a_ * a_ * co * co + c_ * c_ * s * s);
  }

  double arc_length(double phi) const {
    using boost::math::quadrature::gauss;
    return gauss<double, 30>::integrate([this](double t) { return speed(t); }, 0.0, phi);
  }

  double half_meridian() const { return arc_length(std::numbers::pi); }

  double angle_at(double x) const {
    double phi = std::clamp(x / a_, 0.0, std::numbers::pi);
    for (int it = 0; it < 60; ++it) {
      const double f = arc_length(phi) - x;
      const double step = f / speed(phi);
      phi = std::clamp(phi - step, 0.0, std::numbers::pi);
      if (std::abs(step) < 1e-15 * (1.0 + phi)) {
        break;
      }
    }
    return phi;
  }

  double rho(double x) const override {
    if (x < 1e-4 * a_) {
      return 1.0 - pole_curvature_ * x * x / 6.0;
    }
    return a_ * std::sin(angle_at(x)) / x;
  }

  double drho(double x) const override {
    if (x < 1e-4 * a_) {
      return -pole_curvature_ * x / 3.0;
    }
    const double phi = angle_at(x);
    const double r = a_ * std::sin(phi);
    const double dr = a_ * std::cos(phi) / speed(phi);
    return (dr * x - r) / (x * x);
  }

private:
  double a_;
  double c_;
  double pole_curvature_;
};

class Teardrop final : public WarpProfile::Evaluator {
public:
  Teardrop(double beta, double collar, double outer) : beta_(beta), collar_(collar), outer_(outer) {}
  double rho(double x) const override { return beta_ + (outer_ - beta_) * smoothstep(x / collar_); }
  double drho(double x) const override {
    return (outer_ - beta_) * smoothstep_derivative(x / collar_) / collar_;
  }

private:
  double beta_;
  double collar_;
  double outer_;
};

// Clamped cubic spline; end slopes from one-sided 4-point differences.
class Spline final : public WarpProfile::Evaluator {
public:
  Spline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)), m_(x_.size()) {
    const std::size_t n = x_.size();
    const std::array<double, 4> head{x_[0], x_[1], x_[2], x_[3]};
    const std::array<double, 4> tail{x_[n - 4], x_[n - 3], x_[n - 2], x_[n - 1]};
    const auto wh = fd::fornberg_weights(x_[0], head, 1)[1];
    const auto wt = fd::fornberg_weights(x_[n - 1], tail, 1)[1];
    double d0 = 0.0;
    double dn = 0.0;
    for (int j = 0; j < 4; ++j) {
      d0 += wh[j] * y_[j];
      dn += wt[j] * y_[n - 4 + j];
    }
    // Tridiagonal system for second derivatives m_i (Thomas algorithm).
    std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
    const double h0 = x_[1] - x_[0];
    diag[0] = h0 / 3.0;
    sup[0] = h0 / 6.0;
    rhs[0] = (y_[1] - y_[0]) / h0 - d0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1];
      const double hr = x_[i + 1] - x_[i];
      sub[i] = hl / 6.0;
      diag[i] = (hl + hr) / 3.0;
      sup[i] = hr / 6.0;
      rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
    }
    const double hn = x_[n - 1] - x_[n - 2];
    sub[n - 1] = hn / 6.0;
    diag[n - 1] = hn / 3.0;
    rhs[n - 1] = dn - (y_[n - 1] - y_[n - 2]) / hn;
    for (std::size_t i = 1; i < n; ++i) {
      const double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    m_[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
    }
  }

  double rho(double x) const override {
    const auto [i, a, b, h] = locate(x);
    return a * y_[i] + b * y_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
  }

  double drho(double x) const override {
    const auto [i, a, b, h] = locate(x);
    return (y_[i + 1] - y_[i]) / h + ((1.0 - 3.0 * a * a) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h / 6.0;
  }

private:
  struct Cell {
    std::size_t i;
    double a;
    double b;
    double h;
  };

  Cell locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double b = (x - x_[i]) / h;
    return {i, 1.0 - b, b, h};
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConstructionError(fmt::format("{} must be positive and finite, got {}", what, value));
  }
}

} // namespace

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
  case ProfileKind::constant_cone: return "constant-cone";
  case ProfileKind::round_sphere: return "round-sphere";
  case ProfileKind::spheroid: return "spheroid";
  case ProfileKind::teardrop: return "teardrop";
  case ProfileKind::tabulated: return "tabulated";
  }
  return "unknown";
}

ProfileKind profile_kind_from_string(std::string_view name) {
  for (auto kind : {ProfileKind::constant_cone, ProfileKind::round_sphere, ProfileKind::spheroid,
                    ProfileKind::teardrop, ProfileKind::tabulated}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw ConstructionError(fmt::format("unknown profile kind '{}'", name));
}

WarpProfile::WarpProfile(ProfileKind kind, std::vector<double> parameters, double collar_length, double extent,
                         std::shared_ptr<const Evaluator> evaluator)
    : kind_(kind), parameters_(std::move(parameters)), collar_length_(collar_length), extent_(extent),
      evaluator_(std::move(evaluator)) {}

WarpProfile WarpProfile::constant_cone(double rho0, double collar_length) {
  require_positive(rho0, "rho0");
  require_positive(collar_length, "collar length");
  return {ProfileKind::constant_cone, {rho0}, collar_length, kInf, std::make_shared<ConstantCone>(rho0)};
}

WarpProfile WarpProfile::round_sphere(double radius, double collar_length) {
  require_positive(radius, "sphere radius");
  require_positive(collar_length, "collar length");
  const double extent = std::numbers::pi * radius;
  if (collar_length >= extent) {
    throw ConstructionError(fmt::format("round-sphere collar {} must be shorter than pi R = {}", collar_length, extent));
  }
  return {ProfileKind::round_sphere, {radius}, collar_length, extent, std::make_shared<RoundSphere>(radius)};
}

WarpProfile WarpProfile::spheroid(double equatorial_radius, double polar_radius, double collar_length) {
  require_positive(equatorial_radius, "equatorial radius");
  require_positive(polar_radius, "polar radius");
  require_positive(collar_length, "collar length");
  auto eval = std::make_shared<Spheroid>(equatorial_radius, polar_radius);
  const double extent = eval->half_meridian();
  if (collar_length >= extent) {
    throw ConstructionError(fmt::format("spheroid collar {} must be shorter than the half meridian {}",
                                        collar_length, extent));
  }
  return {ProfileKind::spheroid, {equatorial_radius, polar_radius}, collar_length, extent, std::move(eval)};
}

WarpProfile WarpProfile::teardrop(double beta, double collar_length, double outer_rho) {
  require_positive(beta, "teardrop beta");
  require_positive(collar_length, "collar length");
  require_positive(outer_rho, "teardrop outer rho");
  return {ProfileKind::teardrop, {beta, outer_rho}, collar_length, kInf,
          std::make_shared<Teardrop>(beta, collar_length, outer_rho)};
}

WarpProfile WarpProfile::tabulated(std::vector<double> abscissae, std::vector<double> values) {
  if (abscissae.size() != values.size() || abscissae.size() < 4) {
    throw ConstructionError("tabulated profile needs at least 4 (x, rho) samples of equal length");
  }
  if (abscissae.front() != 0.0) {
    throw ConstructionError("tabulated profile must start at x = 0");
  }
  for (std::size_t i = 1; i < abscissae.size(); ++i) {
    if (!(abscissae[i] > abscissae[i - 1])) {
      throw ConstructionError(fmt::format("tabulated abscissae not strictly increasing at index {}", i));
    }
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) {
      throw ConstructionError(fmt::format("tabulated rho must be positive, sample {} is {}", i, values[i]));
    }
  }
  const double collar = abscissae.back();
  auto eval = std::make_shared<Spline>(abscissae, values);
  WarpProfile profile{ProfileKind::tabulated, {}, collar, collar, std::move(eval)};
  profile.table_x_ = std::move(abscissae);
  profile.table_rho_ = std::move(values);
  return profile;
}

void WarpProfile::check_argument(double x) const {
  if (!(x >= 0.0) || x > extent_) {
    throw DomainError(fmt::format("profile evaluated at x = {} outside [0, {}]", x, extent_));
  }
}

double WarpProfile::rho(double x) const {
  check_argument(x);
  return evaluator_->rho(x);
}

double WarpProfile::drho(double x) const {
  check_argument(x);
  return evaluator_->drho(x);
}

MetricCoefficients eval_metric_coeffs(const WarpProfile& profile, double x) {
  if (!(x >= 0.0) || !(x < profile.collar_length())) {
    throw DomainError(fmt::format("x = {} outside the collar [0, {})", x, profile.collar_length()));
  }
  const double rho = profile.rho(x);
  if (!(rho > 0.0)) {
    throw DegenerateMetricError(fmt::format("rho({}) = {} is not positive", x, rho));
  }
  return {rho, x * profile.drho(x) / rho};
}

std::string_view to_string(Topology topology) {
  return topology == Topology::closed ? "closed" : "collar";
}

std::string_view to_string(OuterBoundary bc) {
  return bc == OuterBoundary::dirichlet ? "dirichlet" : "neumann";
}

Topology topology_from_string(std::string_view name) {
  if (name == "closed") return Topology::closed;
  if (name == "collar") return Topology::collar;
  throw ConstructionError(fmt::format("unknown topology '{}'", name));
}

OuterBoundary outer_boundary_from_string(std::string_view name) {
  if (name == "dirichlet") return OuterBoundary::dirichlet;
  if (name == "neumann") return OuterBoundary::neumann;
  throw ConstructionError(fmt::format("unknown outer boundary '{}'", name));
}

SurfaceOfRevolution::SurfaceOfRevolution(Topology topology, WarpProfile north, std::optional<WarpProfile> south,
                                         OuterBoundary outer, double length)
    : topology_(topology), north_(std::move(north)), south_(std::move(south)), outer_(outer), length_(length) {}

SurfaceOfRevolution SurfaceOfRevolution::collar(WarpProfile north, OuterBoundary outer) {
  const double length = north.collar_length();
  if (!(north.rho(length) > 0.0)) {
    throw DegenerateMetricError("collar profile degenerates at its outer boundary");
  }
  return {Topology::collar, std::move(north), std::nullopt, outer, length};
}

SurfaceOfRevolution SurfaceOfRevolution::closed(WarpProfile north, WarpProfile south, double meridian_length) {
  require_positive(meridian_length, "meridian length");
  const double reach = 2.0 * meridian_length / 3.0;
  if (north.extent() < reach || south.extent() < reach) {
    throw ConstructionError("closed surface: each cap profile must extend over two thirds of the meridian");
  }
  SurfaceOfRevolution surface{Topology::closed, std::move(north), std::move(south), OuterBoundary::neumann,
                              meridian_length};
  for (int i = 1; i < 64; ++i) {
    const double x = meridian_length * i / 64.0;
    if (!(surface.radius(x) > 0.0)) {
      throw DegenerateMetricError(fmt::format("closed surface radius vanishes near x = {}", x));
    }
  }
  return surface;
}

SurfaceOfRevolution SurfaceOfRevolution::round_sphere(double radius) {
  const double length = std::numbers::pi * radius;
  auto cap = WarpProfile::round_sphere(radius, 0.5 * length);
  return closed(cap, cap, length);
}

double SurfaceOfRevolution::radius(double x) const {
  if (topology_ == Topology::collar) {
    return north_.radius(x);
  }
  const double w = smoothstep((x - length_ / 3.0) / (length_ / 3.0));
  const double y = length_ - x;
  double r = 0.0;
  if (w < 1.0) r += (1.0 - w) * north_.radius(x);
  if (w > 0.0) r += w * south_->radius(y);
  return r;
}

double SurfaceOfRevolution::dradius(double x) const {
  if (topology_ == Topology::collar) {
    return north_.dradius(x);
  }
  const double t = (x - length_ / 3.0) / (length_ / 3.0);
  const double w = smoothstep(t);
  const double dw = smoothstep_derivative(t) * 3.0 / length_;
  const double y = length_ - x;
  double d = 0.0;
  if (w < 1.0) d += (1.0 - w) * north_.dradius(x);
  if (w > 0.0) d -= w * south_->dradius(y);
  if (dw != 0.0) d += dw * (south_->radius(y) - north_.radius(x));
  return d;
}

CrossSectionSpectrum::CrossSectionSpectrum(int n, std::vector<CrossSectionEigenvalue> entries,
                                           std::optional<double> circle_radius)
    : n_(n), entries_(std::move(entries)), circle_radius_(circle_radius) {}

CrossSectionSpectrum CrossSectionSpectrum::circle(double rho0, int k_max) {
  require_positive(rho0, "circle radius");
  if (k_max < 0) {
    throw ConstructionError("k_max must be non-negative");
  }
  std::vector<CrossSectionEigenvalue> entries;
  entries.reserve(k_max + 1);
  for (int k = 0; k <= k_max; ++k) {
    entries.push_back({-static_cast<double>(k) * k / (rho0 * rho0), k, k == 0 ? 1 : 2});
  }
  return {1, std::move(entries), rho0};
}

CrossSectionSpectrum CrossSectionSpectrum::from_table(int n, std::vector<double> eigenvalues) {
  if (n < 1) {
    throw ConstructionError("cross-section dimension must be >= 1");
  }
  if (eigenvalues.empty()) {
    throw InvalidSpectrumError("empty spectrum table");
  }
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<>());
  if (eigenvalues.front() != 0.0) {
    throw InvalidSpectrumError("spectrum table must contain lambda_0 = 0 as its largest eigenvalue");
  }
  if (eigenvalues.size() > 1 && eigenvalues[1] == 0.0) {
    throw InvalidSpectrumError("lambda_0 = 0 must be simple (connected cross section)");
  }
  std::vector<CrossSectionEigenvalue> entries;
  for (double lambda : eigenvalues) {
    if (!entries.empty() && std::abs(entries.back().lambda - lambda) <= 1e-12 * (1.0 + std::abs(lambda))) {
      ++entries.back().multiplicity;
    } else {
      entries.push_back({lambda, static_cast<int>(entries.size()), 1});
    }
  }
  return {n, std::move(entries), std::nullopt};
}

std::vector<double> CrossSectionSpectrum::eigenvalues() const {
  std::vector<double> out;
  for (const auto& e : entries_) {
    out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.lambda);
  }
  return out;
}

std::optional<double> CrossSectionSpectrum::lambda1() const {
  for (const auto& e : entries_) {
    if (e.lambda != 0.0) {
      return e.lambda;
    }
  }
  return std::nullopt;
}

CrossSectionSpectrum cross_section_spectrum(const WarpProfile& profile, int n, int k_max) {
  if (n != 1) {
    throw UnsupportedError(
        fmt::format("cross-section dimension n = {} needs an externally supplied spectrum table", n));
  }
  return CrossSectionSpectrum::circle(profile.tip_rho(), k_max);
}

} // namespace conelab::geometry
