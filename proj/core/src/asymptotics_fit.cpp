#include "conelab/asymptotics_fit.hpp"

#include "conelab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace conelab::fit {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
  case Verdict::pass: return "PASS";
  case Verdict::fail: return "FAIL";
  case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

TipConstant extract_tip_constant(const ModalField& u, std::span<const double> x, std::size_t skip) {
  if (u.radial_size() < skip + 3 || x.size() != u.radial_size()) {
    throw PreconditionError("extract_tip_constant: not enough shells");
  }
  double s[3];
  double v[3];
  for (int i = 0; i < 3; ++i) {
    s[i] = x[skip + i] * x[skip + i];
    v[i] = u.at(0, skip + i).real();
  }
  const double hi = std::max({v[0], v[1], v[2]});
  const double lo = std::min({v[0], v[1], v[2]});
  if (hi == lo) {
    return {v[0], std::isfinite(v[0])};
  }
  // Lagrange interpolation in s = x^2 evaluated at s = 0.
  double c = 0.0;
  for (int i = 0; i < 3; ++i) {
    double l = 1.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) l *= (0.0 - s[j]) / (s[i] - s[j]);
    }
    c += l * v[i];
  }
  // A smooth c + a x^2 profile moves far less between x = 0 and the first
  // retained shell than across the next decade in x.
  std::size_t ref = skip;
  while (ref + 1 < x.size() && x[ref] < 10.0 * x[skip]) ++ref;
  const double reach = std::abs(u.at(0, ref).real() - v[0]);
  const bool valid = std::isfinite(c) && std::abs(c - v[0]) <= reach;
  return {c, valid};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) {
    throw PreconditionError("fit_line: need at least two points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f{};
  f.count = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  f.slope_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return f;
}

DecayFitReport fit_deviation_exponent(const ModalField& u, std::span<const double> x, double collar_length, double c0,
                                      const WindowPolicy& policy, const std::set<int>& active_modes) {
  const std::size_t n = u.radial_size();
  if (x.size() != n) {
    throw PreconditionError("fit_deviation_exponent: grid and field sizes differ");
  }
  for (int k : active_modes) {
    if (k < 0 || k > u.k_max()) {
      throw PreconditionError(fmt::format("active mode {} not stored in the field", k));
    }
  }
  DecayFitReport report;
  report.c0 = c0;
  report.c0_valid = true;
  report.x_lo = policy.x_lo.value_or(policy.lo_factor * x.front());
  report.x_hi = policy.x_hi.value_or(policy.hi_fraction * collar_length);

  ModalField shifted = u;
  for (std::size_t j = 0; j < n; ++j) shifted.at(0, j) -= c0;
  const std::size_t m = std::max<std::size_t>(64, 8 * static_cast<std::size_t>(u.k_max() + 1));
  const ThetaTransform transform(n, u.k_max(), m);
  const auto phys = transform.to_physical(shifted);

  std::vector<double> lx, ly;
  std::map<int, std::pair<std::vector<double>, std::vector<double>>> per_mode;
  bool any_above_floor = false;
  for (std::size_t j = 0; j < n; ++j) {
    ShellRow row{x[j], 0.0, {}, false};
    for (double v : phys.shell(j)) row.deviation = std::max(row.deviation, std::abs(v));
    for (int k = 0; k <= u.k_max(); ++k) row.mode_abs.push_back(std::abs(shifted.at(k, j)));
    row.in_window = j >= policy.skip_inner && x[j] >= report.x_lo && x[j] <= report.x_hi;
    if (row.in_window) {
      if (row.deviation > policy.floor) {
        any_above_floor = true;
        lx.push_back(std::log(x[j]));
        ly.push_back(std::log(row.deviation));
      }
      for (int k : active_modes) {
        if (row.mode_abs[static_cast<std::size_t>(k)] > policy.floor) {
          per_mode[k].first.push_back(std::log(x[j]));
          per_mode[k].second.push_back(std::log(row.mode_abs[static_cast<std::size_t>(k)]));
        }
      }
    }
    report.shell_data.push_back(std::move(row));
  }
  report.shells = lx.size();
  if (!any_above_floor) {
    report.notes.push_back("deviation below floor: constant state");
  }
  if (lx.size() >= 2) {
    const auto f = fit_line(lx, ly);
    report.alpha_dev = f.slope;
    report.alpha_dev_stderr = f.slope_stderr;
    report.r2 = f.r2;
  }
  for (int k : active_modes) {
    ModeFit mf{k, 0.0, 0.0, 0.0, std::nullopt, false};
    const auto it = per_mode.find(k);
    if (it != per_mode.end() && it->second.first.size() >= 2) {
      const auto f = fit_line(it->second.first, it->second.second);
      mf.alpha = f.slope;
      mf.stderr = f.slope_stderr;
      mf.r2 = f.r2;
    } else {
      report.notes.push_back(fmt::format("mode {} has fewer than two usable shells", k));
    }
    report.modes.push_back(mf);
  }
  return report;
}

Verdict compare_with_prediction(DecayFitReport& report, const mellin::DecayPrediction& prediction, double tolerance,
                                const WindowPolicy& policy) {
  report.alpha_pred = prediction.alpha_pred;
  report.tolerance = tolerance;
  bool inconclusive = false;
  if (!report.c0_valid) {
    inconclusive = true;
    report.notes.push_back("tip constant extrapolation diverged");
  }
  if (report.shells < policy.min_shells) {
    inconclusive = true;
    report.notes.push_back(fmt::format("only {} shells in the fit window (need {})", report.shells,
                                       policy.min_shells));
  } else if (report.r2 < policy.min_r2) {
    inconclusive = true;
    report.notes.push_back(fmt::format("deviation fit R^2 = {:.4f} below {}", report.r2, policy.min_r2));
  }
  bool modes_ok = true;
  for (auto& mf : report.modes) {
    const auto it = std::find_if(prediction.mode_exponents.begin(), prediction.mode_exponents.end(),
                                 [&](const mellin::ModeExponent& e) { return e.mode == mf.mode; });
    if (it != prediction.mode_exponents.end()) {
      mf.oracle = it->exponent;
    }
    if (mf.r2 < policy.min_r2) {
      inconclusive = true;
      report.notes.push_back(fmt::format("mode {} fit R^2 = {:.4f} below {}", mf.mode, mf.r2, policy.min_r2));
    }
    mf.within_tolerance = mf.oracle && std::abs(mf.alpha - *mf.oracle) <= tolerance;
    modes_ok = modes_ok && mf.within_tolerance;
  }
  if (inconclusive) {
    report.verdict = Verdict::inconclusive;
  } else if (report.alpha_dev >= prediction.alpha_pred - tolerance && modes_ok) {
    report.verdict = Verdict::pass;
  } else {
    report.verdict = Verdict::fail;
  }
  return report.verdict;
}

OrderingCheck check_ordering(const std::vector<std::pair<double, DecayFitReport>>& sweep, int mode) {
  OrderingCheck check;
  bool inconclusive = sweep.size() < 2;
  for (const auto& [rho0, report] : sweep) {
    const auto it =
        std::find_if(report.modes.begin(), report.modes.end(), [mode](const ModeFit& m) { return m.mode == mode; });
    SweepPoint point{rho0, std::numeric_limits<double>::quiet_NaN(), report.verdict};
    if (it == report.modes.end()) {
      inconclusive = true;
    } else {
      point.alpha = it->alpha;
    }
    inconclusive = inconclusive || report.verdict == Verdict::inconclusive;
    check.points.push_back(point);
  }
  std::sort(check.points.begin(), check.points.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.rho0 < b.rho0; });
  bool decreasing = true;
  for (std::size_t i = 1; i < check.points.size(); ++i) {
    decreasing = decreasing && check.points[i].rho0 > check.points[i - 1].rho0 &&
                 check.points[i].alpha < check.points[i - 1].alpha;
  }
  check.verdict = inconclusive ? Verdict::inconclusive : (decreasing ? Verdict::pass : Verdict::fail);
  return check;
}

} // namespace conelab::fit
