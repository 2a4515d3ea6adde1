#pragma once

#include "conelab/app/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace conelab::app {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  /// Headline measured value(s).
  std::string value;
  std::string detail;
  double seconds = 0.0;
};

/// Random (n, lambda) pairs: closed-form poles against a polynomial root finder.
CriterionResult check_symbol_oracle(std::uint64_t seed = 20240611);
/// Worked weight windows and randomized emptiness, decided by interval arithmetic.
CriterionResult check_weight_window(std::uint64_t seed = 20240612);
CriterionResult check_curvature_boundary();
/// Sphere refinement ladders from the scenario's mms block.
CriterionResult check_mms_convergence(const RunConfig& scenario);
/// Constant-data decay exponent on the straight cone scenario.
CriterionResult check_constant_data_rate(const RunConfig& scenario);
/// Mode-1 exponents over a cone-angle sweep and their ordering.
CriterionResult check_geometry_effect(const std::vector<RunConfig>& sweep);
CriterionResult check_pointwise_bound(std::uint64_t seed = 20240613);
CriterionResult check_sectoriality();
/// Zero forcing, constant forcing and the focusing scenario.
CriterionResult check_monitor(const RunConfig& focusing);

/// One line per criterion: "[PASS] 5 name: value (detail) 1.23s".
std::string format_result(const CriterionResult& r);

} // namespace conelab::app
