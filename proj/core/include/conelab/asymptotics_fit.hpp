#pragma once

#include "conelab/field.hpp"
#include "conelab/mellin_analysis.hpp"

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conelab::fit {

enum class Verdict { pass, fail, inconclusive };
std::string_view to_string(Verdict verdict);

struct TipConstant {
  double value;
  bool valid;
};

/// Extrapolates the mode-0 profile to x = 0 by fitting c + a x^2 + b x^4
/// through the three innermost retained shells (skipping `skip` nodes).
/// Invalid when the extrapolation is not finite or lands further from the
/// innermost retained value than the profile moves over the next decade in x.
TipConstant extract_tip_constant(const ModalField& u, std::span<const double> x, std::size_t skip = 2);

/// Ordinary least squares y = intercept + slope x.
struct LineFit {
  double slope;
  double intercept;
  double slope_stderr;
  double r2;
  std::size_t count;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct WindowPolicy {
  /// Absolute bounds; when unset, lo = lo_factor * x_min and hi = hi_fraction * collar length.
  std::optional<double> x_lo;
  std::optional<double> x_hi;
  double lo_factor = 10.0;
  double hi_fraction = 0.1;
  /// Innermost nodes never used (closure pollution).
  std::size_t skip_inner = 2;
  std::size_t min_shells = 8;
  double min_r2 = 0.98;
  /// Deviations below this are treated as a pure constant state.
  double floor = 1e-13;
};

struct ModeFit {
  int mode;
  double alpha;
  double stderr;
  double r2;
  std::optional<double> oracle;
  bool within_tolerance;
};

struct ShellRow {
  double x;
  /// max over theta of |u - c0|.
  double deviation;
  /// |u_k| per mode (|u_0 - c0| for k = 0).
  std::vector<double> mode_abs;
  bool in_window;
};

struct DecayFitReport {
  double time = 0.0;
  double c0 = 0.0;
  bool c0_valid = false;
  double x_lo = 0.0;
  double x_hi = 0.0;
  std::size_t shells = 0;
  double alpha_dev = 0.0;
  double alpha_dev_stderr = 0.0;
  double r2 = 0.0;
  std::vector<ModeFit> modes;
  std::optional<double> alpha_pred;
  double tolerance = 0.15;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> notes;
  std::vector<ShellRow> shell_data;
};

/// Least-squares slope of log max_theta |u - c0| against log x over the
/// window, plus per-mode slopes for the active modes. The verdict is left
/// INCONCLUSIVE here; compare_with_prediction decides it.
DecayFitReport fit_deviation_exponent(const ModalField& u, std::span<const double> x, double collar_length, double c0,
                                      const WindowPolicy& policy, const std::set<int>& active_modes);

/// PASS iff alpha_dev >= alpha_pred - tol and every active mode is within tol
/// of its oracle exponent; INCONCLUSIVE on too few shells, R^2 below the
/// policy minimum, an invalid tip constant or a constant state.
Verdict compare_with_prediction(DecayFitReport& report, const mellin::DecayPrediction& prediction, double tolerance,
                                const WindowPolicy& policy = {});

struct SweepPoint {
  double rho0;
  double alpha;
  Verdict verdict;
};

struct OrderingCheck {
  std::vector<SweepPoint> points;
  /// Strictly decreasing alpha in rho0 and no INCONCLUSIVE point.
  Verdict verdict;
};

/// Geometry-effect ordering over a sweep of cone angles for one mode.
OrderingCheck check_ordering(const std::vector<std::pair<double, DecayFitReport>>& sweep, int mode);

} // namespace conelab::fit
