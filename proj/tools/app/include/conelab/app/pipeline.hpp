#pragma once

#include "conelab/app/config.hpp"

#include <conelab/asymptotics_fit.hpp>
#include <conelab/disc_operator.hpp>
#include <conelab/field.hpp>
#include <conelab/geometry.hpp>
#include <conelab/integrator.hpp>
#include <conelab/mellin_analysis.hpp>
#include <conelab/mms.hpp>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace conelab::app {

geometry::WarpProfile build_profile(const ProfileSpec& spec, std::optional<double> default_collar = std::nullopt);
geometry::SurfaceOfRevolution build_surface(const GeometryConfig& cfg);
/// Cross-section spectrum of the north tip; n = 1 uses the circle of radius
/// rho(0) with modes up to max(k_max, 2), n > 1 the configured table.
geometry::CrossSectionSpectrum build_spectrum(const RunConfig& cfg);
dyn::Nonlinearity build_nonlinearity(const DynamicsConfig& cfg);
disc::RadialGrid build_grid(const RunConfig& cfg, const geometry::SurfaceOfRevolution& surface);
ModalField initial_field(const RunConfig& cfg, const disc::RadialGrid& grid, double collar_length);
/// Solver settings with the monitor weight set to `gamma` unless the
/// configuration fixes it.
dyn::SolverConfig solver_config(const RunConfig& cfg, double gamma, double collar_length);

struct AnalysisResult {
  geometry::CrossSectionSpectrum spectrum;
  mellin::PoleReport poles;
  mellin::WeightWindow window;
  bool curvature_condition = false;
  bool gamma_auto = true;
  /// Resolved weight; empty when auto-max meets an empty window.
  std::optional<double> gamma;
  std::optional<mellin::AsymptoticsTemplate> asymptotics;
  std::optional<mellin::DecayPrediction> prediction;
  std::vector<std::string> notes;

  /// "OK" or "EMPTY_WINDOW".
  std::string status() const;
};

AnalysisResult run_analysis(const RunConfig& cfg);
nlohmann::json analysis_json(const AnalysisResult& result, const std::string& hash);

struct SimulationResult {
  explicit SimulationResult(disc::RadialGrid g) : grid(std::move(g)) {}

  disc::RadialGrid grid;
  dyn::RunState state;
  double gamma = 0.0;
  bool gamma_auto = true;
  std::size_t theta_points = 0;
  std::vector<double> snapshot_times;
  std::string hash;
  double wall_seconds = 0.0;

  bool solver_failed() const { return state.halt == dyn::HaltReason::solver_failure; }
};

/// Runs the configured dynamics. With `out_dir` set, streams snapshots.csv
/// and monitor.csv and writes manifest.json there. Throws ConfigError when
/// no weight can be resolved or n != 1.
SimulationResult run_simulation(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir);

struct SnapshotSet {
  std::string hash;
  std::vector<double> x;
  std::vector<double> times;
  std::vector<ModalField> fields;
};

/// Reads a (t, x, k, re, im) snapshot CSV. Throws std::runtime_error naming
/// the file and line on malformed input.
SnapshotSet read_snapshots(const std::filesystem::path& path);

struct FitResult {
  fit::DecayFitReport report;
  std::optional<mellin::DecayPrediction> prediction;
  fit::WindowPolicy policy;
};

FitResult fit_field(const RunConfig& cfg, const AnalysisResult& analysis, const ModalField& u,
                    std::span<const double> x, double time);
nlohmann::json fit_json(const FitResult& fit, const std::string& hash);
/// Writes fit_report.json and shells.csv.
void write_fit(const FitResult& fit, const std::string& hash, const std::filesystem::path& out_dir);

std::shared_ptr<const dyn::ManufacturedSolution> manufactured_solution(const RunConfig& cfg);
dyn::MmsTable run_mms(const RunConfig& cfg);
/// Writes mms.csv and mms.json.
void write_mms(const dyn::MmsTable& table, const std::string& hash, const std::filesystem::path& out_dir);

/// Writes `text` to `path` (creating parent directories).
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace conelab::app
