#pragma once

#include <conelab/disc_operator.hpp>
#include <conelab/geometry.hpp>
#include <conelab/integrator.hpp>
#include <conelab/mellin_analysis.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace conelab::app {

/// Raised for unreadable, malformed or invalid configuration files. The
/// message names the offending field and, when known, its line.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ProfileSpec {
  geometry::ProfileKind kind = geometry::ProfileKind::constant_cone;
  double rho0 = 0.5;
  double radius = 1.0;
  double equatorial_radius = 1.0;
  double polar_radius = 1.0;
  double beta = 0.5;
  double outer_rho = 1.0;
  std::vector<double> table_x;
  std::vector<double> table_rho;
  /// Required on collars; closed surfaces default to half the meridian.
  std::optional<double> collar_length;

  bool operator==(const ProfileSpec&) const = default;
};

struct GeometryConfig {
  ProfileSpec north;
  std::optional<ProfileSpec> south;
  geometry::Topology topology = geometry::Topology::collar;
  geometry::OuterBoundary outer_bc = geometry::OuterBoundary::neumann;
  /// Closed surfaces only; defaults to pi R for round spheres.
  std::optional<double> meridian_length;

  bool operator==(const GeometryConfig&) const = default;
};

struct DiscretizationConfig {
  int n_radial = 256;
  int k_max = 0;
  double x_min = 1e-3;
  bool x_min_relative = true;
  std::size_t theta_points = 0;
  disc::Extension extension = disc::Extension::chosen;

  bool operator==(const DiscretizationConfig&) const = default;
};

struct AnalysisConfig {
  int n = 1;
  double p = 8.0;
  double q = 4.0;
  /// nullopt means "auto-max".
  std::optional<double> gamma;
  double epsilon = 0.05;
  mellin::WeightPath path = mellin::WeightPath::evolution;
  /// Cross-section eigenvalues for n > 1 (must include 0).
  std::vector<double> spectrum;

  bool operator==(const AnalysisConfig&) const = default;
};

struct CoefficientSpec {
  double constant = 0.0;
  std::vector<double> times;
  std::vector<double> values;
  double lipschitz = 0.0;

  bool tabulated() const { return !times.empty(); }
  bool operator==(const CoefficientSpec&) const = default;
};

/// amplitude * b((x - center r) / (width r)) * cos(mode theta + phase) with
/// r the collar length and b(z) = exp(1 - 1 / (1 - z^2)) on |z| < 1.
struct BumpSpec {
  int mode = 0;
  double amplitude = 0.0;
  double center = 0.5;
  double width = 0.25;
  double phase = 0.0;

  bool operator==(const BumpSpec&) const = default;
};

struct InitialSpec {
  double constant = 0.0;
  std::vector<BumpSpec> bumps;

  bool operator==(const InitialSpec&) const = default;
};

struct DynamicsConfig {
  /// alpha_0 .. alpha_m.
  std::vector<CoefficientSpec> nonlinearity;
  InitialSpec initial;
  double dt = 1e-3;
  double t_final = 1.0;
  dyn::Scheme scheme = dyn::Scheme::imex_bdf2;
  double shift = 0.0;
  double threshold_a = 1e6;
  double threshold_b = 0.0;
  double blowup_bound = 1e8;
  double stability_bound = 1.0;
  int monitor_s = 0;
  double monitor_p = 2.0;
  /// nullopt: the analysis weight.
  std::optional<double> monitor_gamma;

  bool operator==(const DynamicsConfig&) const = default;
};

struct NormSpec {
  std::string name;
  int s = 0;
  double p = 2.0;
  std::optional<double> gamma;

  bool operator==(const NormSpec&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  /// Snapshot cadence in simulated time; 0 writes the initial and final states only.
  double snapshot_every = 0.0;
  std::vector<NormSpec> norms;

  bool operator==(const OutputConfig&) const = default;
};

struct FitConfig {
  std::optional<double> x_lo;
  std::optional<double> x_hi;
  double lo_factor = 10.0;
  double hi_fraction = 0.1;
  double tolerance = 0.15;
  std::vector<int> active_modes{0};

  bool operator==(const FitConfig&) const = default;
};

struct MmsConfig {
  /// sphere-zonal | constant | cone-power
  std::string solution = "sphere-zonal";
  double value = 1.0;
  int mode = 1;
  /// (exponent, coefficient) pairs for cone-power.
  std::vector<double> exponents;
  std::vector<double> coefficients;
  std::vector<int> n_radial{64, 128, 256, 512};
  double spatial_dt = 2.5e-5;
  double spatial_t_final = 0.05;
  std::vector<double> dts{4e-3, 2e-3, 1e-3};
  int temporal_n = 256;
  double temporal_t_final = 0.5;

  bool operator==(const MmsConfig&) const = default;
};

struct RunConfig {
  GeometryConfig geometry;
  DiscretizationConfig discretization;
  AnalysisConfig analysis;
  DynamicsConfig dynamics;
  OutputConfig output;
  FitConfig fit;
  std::optional<MmsConfig> mms;

  bool operator==(const RunConfig&) const = default;
};

/// Parses YAML text; `overrides` are "block.key=value" strings applied
/// before validation. Unknown keys are rejected.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       const std::string& source = "<config>");
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical YAML form (fixed key order, shortest round-trip numbers).
std::string serialize_config(const RunConfig& cfg);

/// SHA-256 of the canonical form, hex encoded.
std::string config_hash(const RunConfig& cfg);

std::string sha256_hex(const std::string& text);

} // namespace conelab::app
