#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace conelab::geometry {

enum class ProfileKind { constant_cone, round_sphere, spheroid, teardrop, tabulated };

std::string_view to_string(ProfileKind kind);
ProfileKind profile_kind_from_string(std::string_view name);

/// Radius function rho(x) of the warped metric dx^2 + x^2 rho(x)^2 dtheta^2
/// near a tip or pole.
///
/// Profiles are immutable after construction and cheap to copy (shared
/// evaluator). rho and rho' may be evaluated on [0, extent()], which is at
/// least the collar [0, r]; eval_metric_coeffs enforces the collar itself.
class WarpProfile {
public:
  class Evaluator {
  public:
    virtual ~Evaluator() = default;
    virtual double rho(double x) const = 0;
    virtual double drho(double x) const = 0;
  };

  static WarpProfile constant_cone(double rho0, double collar_length);
  /// Geodesic polar coordinates around a point of a round sphere of radius R:
  /// rho(x) = R sin(x/R) / x, rho(0) = 1.
  static WarpProfile round_sphere(double radius, double collar_length);
  /// Pole of an ellipsoid of revolution with the given equatorial radius and
  /// polar semi-axis; x is meridian arc length from the pole.
  static WarpProfile spheroid(double equatorial_radius, double polar_radius, double collar_length);
  /// rho(x) = beta + (outer_rho - beta) s(x/r), s the quintic smoothstep.
  static WarpProfile teardrop(double beta, double collar_length, double outer_rho = 1.0);
  /// Clamped cubic spline through (x_i, rho_i); the collar is [x_0, x_last]
  /// and x_0 must be 0.
  static WarpProfile tabulated(std::vector<double> abscissae, std::vector<double> values);

  ProfileKind kind() const { return kind_; }
  const std::vector<double>& parameters() const { return parameters_; }
  double collar_length() const { return collar_length_; }
  /// Largest x at which rho may be evaluated.
  double extent() const { return extent_; }

  double rho(double x) const;
  double drho(double x) const;
  double tip_rho() const { return rho(0.0); }

  /// Cross-section circle radius R(x) = x rho(x) and its derivative.
  double radius(double x) const { return x * rho(x); }
  double dradius(double x) const { return rho(x) + x * drho(x); }

  /// Sample abscissae for tabulated profiles (empty otherwise).
  const std::vector<double>& table_abscissae() const { return table_x_; }
  const std::vector<double>& table_values() const { return table_rho_; }

private:
  WarpProfile(ProfileKind kind, std::vector<double> parameters, double collar_length, double extent,
              std::shared_ptr<const Evaluator> evaluator);

  void check_argument(double x) const;

  ProfileKind kind_;
  std::vector<double> parameters_;
  double collar_length_;
  double extent_;
  std::shared_ptr<const Evaluator> evaluator_;
  std::vector<double> table_x_;
  std::vector<double> table_rho_;
};

/// Metric-derived coefficients entering the cone Laplacian at one x.
struct MetricCoefficients {
  double rho;
  /// H(x) = x rho'(x) / rho(x), the n = 1 case of x d/dx det(h) / (2 det h).
  double h;
};

/// Throws DomainError unless 0 <= x < collar_length, DegenerateMetricError if rho(x) <= 0.
MetricCoefficients eval_metric_coeffs(const WarpProfile& profile, double x);

enum class Topology { closed, collar };
enum class OuterBoundary { dirichlet, neumann };

std::string_view to_string(Topology topology);
std::string_view to_string(OuterBoundary bc);
Topology topology_from_string(std::string_view name);
OuterBoundary outer_boundary_from_string(std::string_view name);

/// A surface of revolution in geodesic polar coordinates x in [0, L].
///
/// Collar topology: one tip at x = 0 described by the north profile and an
/// outer boundary at x = L = collar length carrying one boundary condition.
/// Closed topology: tips at both ends; R(x) = x rho_N(x) near 0 and
/// (L - x) rho_S(L - x) near L, blended smoothly across the middle third.
class SurfaceOfRevolution {
public:
  static SurfaceOfRevolution collar(WarpProfile north, OuterBoundary outer);
  static SurfaceOfRevolution closed(WarpProfile north, WarpProfile south, double meridian_length);
  /// Round sphere of radius R: both poles are round-sphere profiles, L = pi R.
  static SurfaceOfRevolution round_sphere(double radius);

  Topology topology() const { return topology_; }
  const WarpProfile& north() const { return north_; }
  /// South profile; only present for closed surfaces.
  const std::optional<WarpProfile>& south() const { return south_; }
  OuterBoundary outer_boundary() const { return outer_; }
  double meridian_length() const { return length_; }
  /// Collar length of the north tip (used for grid blending and norm cutoffs).
  double collar_length() const { return north_.collar_length(); }

  double radius(double x) const;
  double dradius(double x) const;

private:
  SurfaceOfRevolution(Topology topology, WarpProfile north, std::optional<WarpProfile> south,
                      OuterBoundary outer, double length);

  Topology topology_;
  WarpProfile north_;
  std::optional<WarpProfile> south_;
  OuterBoundary outer_;
  double length_;
};

/// One eigenvalue of the cross-section Laplacian together with its mode
/// label (|k| for n = 1 circles, the table index otherwise).
struct CrossSectionEigenvalue {
  double lambda;
  int mode;
  int multiplicity;
};

/// Spectrum of the frozen cross-section Laplacian, non-positive convention:
/// lambda_0 = 0 > lambda_1 >= lambda_2 >= ...
class CrossSectionSpectrum {
public:
  /// n = 1 circle of radius rho0: lambda_k = -k^2 / rho0^2, k = 0..k_max.
  static CrossSectionSpectrum circle(double rho0, int k_max);
  /// Externally supplied spectrum for cross sections of dimension n; values
  /// are grouped, sorted descending and validated.
  static CrossSectionSpectrum from_table(int n, std::vector<double> eigenvalues);

  int dimension() const { return n_; }
  const std::vector<CrossSectionEigenvalue>& entries() const { return entries_; }
  /// All eigenvalues repeated by multiplicity, sorted descending.
  std::vector<double> eigenvalues() const;
  /// Greatest non-zero eigenvalue, if any.
  std::optional<double> lambda1() const;
  /// Circle radius for n = 1 spectra built by circle(); nullopt otherwise.
  std::optional<double> circle_radius() const { return circle_radius_; }

private:
  CrossSectionSpectrum(int n, std::vector<CrossSectionEigenvalue> entries, std::optional<double> circle_radius);

  int n_;
  std::vector<CrossSectionEigenvalue> entries_;
  std::optional<double> circle_radius_;
};

/// Spectrum of Delta_{h(0)} for a profile. Only n = 1 is computed here; other
/// dimensions need CrossSectionSpectrum::from_table (UnsupportedError).
CrossSectionSpectrum cross_section_spectrum(const WarpProfile& profile, int n, int k_max);

} // namespace conelab::geometry
