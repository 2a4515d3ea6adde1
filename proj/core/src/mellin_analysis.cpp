#include "conelab/mellin_analysis.hpp"

#include "conelab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace conelab::mellin {

namespace {

constexpr double kMergeTolerance = 1e-9;

struct Zero {
  std::complex<double> z;
  int order;
};

void add_zero(std::vector<Zero>& zeros, std::complex<double> z, int order) {
  for (auto& existing : zeros) {
    if (std::abs(existing.z - z) < kMergeTolerance) {
      existing.order += order;
      return;
    }
  }
  zeros.push_back({z, order});
}

// Zeros of z^2 - (n-1) z + lambda with multiplicity.
std::vector<Zero> symbol_zeros(int n, double lambda) {
  const double centre = 0.5 * (n - 1);
  const auto root = std::sqrt(std::complex<double>(centre * centre - lambda, 0.0));
  std::vector<Zero> zeros;
  add_zero(zeros, centre + root, 1);
  add_zero(zeros, centre - root, 1);
  return zeros;
}

void require_negative_lambda1(double lambda1) {
  if (!(lambda1 < 0.0)) {
    throw InvalidSpectrumError(fmt::format("lambda1 must be negative (non-positive spectrum convention), got {}",
                                           lambda1));
  }
}

double decaying_root(int n, double lambda) {
  if (lambda == 0.0) {
    return 2.0;
  }
  const double centre = 0.5 * (n - 1);
  return std::sqrt(centre * centre - lambda) - centre;
}

} // namespace

std::complex<double> laplacian_symbol(int n, double lambda, std::complex<double> z) {
  return z * z - static_cast<double>(n - 1) * z + lambda;
}

PoleReport laplacian_poles(const geometry::CrossSectionSpectrum& spectrum) {
  PoleReport report{spectrum.dimension(), {}};
  for (const auto& e : spectrum.entries()) {
    PoleEntry entry{e.mode, e.lambda, {}, {}};
    for (const auto& zero : symbol_zeros(spectrum.dimension(), e.lambda)) {
      entry.poles.push_back(zero.z);
      entry.multiplicities.push_back(zero.order);
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

double weight_cap(int n, double lambda1) {
  const double centre = 0.5 * (n - 1);
  return std::min(-1.0 + std::sqrt(centre * centre - lambda1), 0.5 * (n + 1));
}

WeightWindow admissible_weights(int n, double p, double q, double lambda1, WeightPath path) {
  require_negative_lambda1(lambda1);
  if (!(p > 1.0) || !(q > 1.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw PreconditionError(fmt::format("p and q must lie in (1, inf), got p = {}, q = {}", p, q));
  }
  if (n < 1) {
    throw PreconditionError("cross-section dimension must be >= 1");
  }
  WeightWindow w{};
  w.n = n;
  w.p = p;
  w.q = q;
  w.lambda1 = lambda1;
  w.path = path;
  const double base = 0.5 * (n - 3);
  const double cap = weight_cap(n, lambda1);
  w.gamma_max = cap;
  w.gamma_min = path == WeightPath::evolution ? base + 2.0 / q : base;
  w.q_constraint = 2.0 / q < cap - base;
  w.p_constraint = 2.0 / q + (n + 1.0) / p < 2.0;
  return w;
}

bool curvature_condition(int n, double lambda1) {
  require_negative_lambda1(lambda1);
  return -lambda1 >= 2.0 * (n + 1);
}

AsymptoticsTemplate bilaplacian_asymptotics(const geometry::CrossSectionSpectrum& spectrum, double gamma) {
  const int n = spectrum.dimension();
  const auto lambda1 = spectrum.lambda1();
  const double lo = 0.5 * (n - 3);
  const double hi = lambda1 ? weight_cap(n, *lambda1) : 0.5 * (n + 1);
  if (!(lo < gamma && gamma < hi)) {
    throw PreconditionError(fmt::format("gamma = {} outside the weight window ({}, {})", gamma, lo, hi));
  }

  AsymptoticsTemplate tmpl{};
  tmpl.n = n;
  tmpl.gamma = gamma;
  tmpl.strip_lo = 0.5 * (n + 1) - gamma - 4.0;
  tmpl.strip_hi = 0.5 * (n + 1) - gamma - 2.0;
  tmpl.has_constants = true;

  for (const auto& e : spectrum.entries()) {
    std::vector<Zero> zeros;
    for (const auto& z : symbol_zeros(n, e.lambda)) {
      add_zero(zeros, z.z, z.order);
      add_zero(zeros, z.z - 2.0, z.order);
    }
    std::sort(zeros.begin(), zeros.end(), [](const Zero& a, const Zero& b) { return a.z.real() > b.z.real(); });
    for (const auto& z : zeros) {
      const double re = z.z.real();
      if (!(re >= tmpl.strip_lo && re < tmpl.strip_hi)) {
        continue;
      }
      tmpl.terms.push_back({z.z, 0, e.mode, z.order});
      if (z.order >= 2) {
        tmpl.terms.push_back({z.z, 1, e.mode, z.order});
      }
      if (z.order >= 3) {
        tmpl.diagnostics.push_back(fmt::format("mode {}: zero at {} has order {}; log powers capped at 1", e.mode,
                                               re, z.order));
      }
    }
    tmpl.indicial_roots.emplace_back(e.mode, decaying_root(n, e.lambda));
  }
  return tmpl;
}

double decay_delta(double q, double epsilon) {
  return q <= 2.0 ? 2.0 / q + epsilon : 0.0;
}

DecayPrediction predicted_deviation_exponent(const AsymptoticsTemplate& tmpl, double gamma, double q, double epsilon,
                                             const std::set<int>& active_modes) {
  DecayPrediction pred{};
  pred.gamma = gamma;
  pred.q = q;
  pred.epsilon = epsilon;
  pred.delta = decay_delta(q, epsilon);
  pred.alpha_pred = gamma - 0.5 * (tmpl.n - 3) - pred.delta;
  pred.active_modes = active_modes;

  for (int mode : active_modes) {
    const auto root = std::find_if(tmpl.indicial_roots.begin(), tmpl.indicial_roots.end(),
                                   [mode](const auto& r) { return r.first == mode; });
    if (root == tmpl.indicial_roots.end()) {
      throw PreconditionError(fmt::format("active mode {} is not part of the spectrum", mode));
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& term : tmpl.terms) {
      if (term.mode == mode && term.exponent() > 0.0) {
        best = std::min(best, term.exponent());
      }
    }
    if (std::isfinite(best)) {
      pred.mode_exponents.push_back({mode, best, true});
    } else {
      pred.mode_exponents.push_back({mode, root->second, false});
    }
  }
  for (const auto& m : pred.mode_exponents) {
    pred.leading_exponent = pred.leading_exponent ? std::min(*pred.leading_exponent, m.exponent) : m.exponent;
  }
  return pred;
}

} // namespace conelab::mellin
