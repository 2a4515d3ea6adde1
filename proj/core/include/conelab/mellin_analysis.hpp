#pragma once

#include "conelab/geometry.hpp"

#include <complex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace conelab::mellin {

/// Poles of the inverted conormal symbol of the Laplacian restricted to one
/// eigenvalue of the cross-section Laplacian.
struct PoleEntry {
  int mode;
  double lambda;
  std::vector<std::complex<double>> poles;
  /// Multiplicity of each pole (parallel to `poles`).
  std::vector<int> multiplicities;
};

struct PoleReport {
  int n;
  std::vector<PoleEntry> entries;
};

/// Conormal symbol of the Laplacian on one mode: z^2 - (n-1) z + lambda.
std::complex<double> laplacian_symbol(int n, double lambda, std::complex<double> z);

/// Closed-form poles (n-1)/2 +- sqrt(((n-1)/2)^2 - lambda_i) for every
/// eigenvalue of the spectrum. Roots closer than 1e-9 merge into one pole of
/// multiplicity 2.
PoleReport laplacian_poles(const geometry::CrossSectionSpectrum& spectrum);

enum class WeightPath {
  /// Sectoriality of the Laplacian: (n-3)/2 < gamma < gamma_max.
  laplacian,
  /// Data choice for the evolution problem: (n-3)/2 + 2/q < gamma < gamma_max.
  evolution,
};

struct WeightWindow {
  double gamma_min;
  double gamma_max;
  /// 2/q < gamma_cap - (n-3)/2, equivalent to the interval being non-empty.
  bool q_constraint;
  /// 2/q + (n+1)/p < 2.
  bool p_constraint;
  int n;
  double p;
  double q;
  double lambda1;
  WeightPath path;

  bool empty() const { return !(gamma_min < gamma_max); }
  bool contains(double gamma) const { return gamma_min < gamma && gamma < gamma_max; }
  /// Non-empty interval and both data constraints satisfied.
  bool admissible() const { return !empty() && q_constraint && p_constraint; }
};

/// Upper end min{-1 + sqrt(((n-1)/2)^2 - lambda1), (n+1)/2} of every window.
double weight_cap(int n, double lambda1);

/// Admissible Mellin weights. Emptiness is reported in the window, never thrown.
/// Throws InvalidSpectrumError if lambda1 >= 0, PreconditionError if p or q
/// are not in (1, inf).
WeightWindow admissible_weights(int n, double p, double q, double lambda1, WeightPath path);

/// Large-curvature condition -lambda1 >= 2(n+1). Throws InvalidSpectrumError
/// if lambda1 >= 0.
bool curvature_condition(int n, double lambda1);

struct TemplateTerm {
  /// The asymptotic term is c(y) x^{-rho} log^k(x); `rho` is the symbol zero.
  std::complex<double> rho;
  int log_power;
  int mode;
  /// Total order of the zero of sigma(z) sigma(z + 2) at rho on this mode.
  int zero_order;

  /// Power of x in the term, i.e. -Re(rho).
  double exponent() const { return -rho.real(); }
};

struct AsymptoticsTemplate {
  int n;
  double gamma;
  double strip_lo;
  double strip_hi;
  /// The constant functions are always part of the chosen domain.
  bool has_constants;
  std::vector<TemplateTerm> terms;
  std::vector<std::string> diagnostics;
  /// Per-mode decaying indicial roots (positive zero of sigma on each mode),
  /// kept for predictions when a mode contributes no term in the strip.
  std::vector<std::pair<int, double>> indicial_roots;
};

/// Enumerates the zeros of z -> sigma(z) sigma(z + 2) per mode that fall in
/// the strip [(n+1)/2 - gamma - 4, (n+1)/2 - gamma - 2). Zeros of total order
/// 2 carry a second term with log power 1; order >= 3 is reported in the
/// diagnostics and capped at log power 1.
/// Throws PreconditionError unless gamma lies in the Laplacian weight window.
AsymptoticsTemplate bilaplacian_asymptotics(const geometry::CrossSectionSpectrum& spectrum, double gamma);

struct ModeExponent {
  int mode;
  double exponent;
  /// False when the strip holds no positive exponent for this mode and the
  /// decaying indicial root (or 2 for the constant mode) was used instead.
  bool from_template;
};

struct DecayPrediction {
  /// Guaranteed bound gamma - (n-3)/2 - delta_{q,eps}.
  double alpha_pred;
  double delta;
  double gamma;
  double q;
  double epsilon;
  std::vector<ModeExponent> mode_exponents;
  /// Minimum over active modes of the per-mode leading exponent.
  std::optional<double> leading_exponent;
  std::set<int> active_modes;
};

/// delta_{q,eps} = 2/q + eps if q <= 2, 0 otherwise.
double decay_delta(double q, double epsilon);

DecayPrediction predicted_deviation_exponent(const AsymptoticsTemplate& tmpl, double gamma, double q, double epsilon,
                                             const std::set<int>& active_modes);

} // namespace conelab::mellin
