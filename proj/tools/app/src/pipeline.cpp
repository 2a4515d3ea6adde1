#include "conelab/app/pipeline.hpp"

#include <conelab/errors.hpp>
#include <conelab/mellin_norms.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace conelab::app {

namespace {

using nlohmann::json;

std::string g17(double v) { return fmt::format("{:.17g}", v); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return out;
}

double bump(double z) { return std::abs(z) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - z * z)) : 0.0; }

norms::MellinNormConfig norm_config(const RunConfig& cfg, int s, double p, double gamma, double collar_length) {
  norms::MellinNormConfig n;
  n.s = s;
  n.p = p;
  n.gamma = gamma;
  n.n = cfg.analysis.n;
  n.omega = norms::default_cutoff(collar_length);
  return n;
}

} // namespace

geometry::WarpProfile build_profile(const ProfileSpec& spec, std::optional<double> default_collar) {
  using geometry::ProfileKind;
  using geometry::WarpProfile;
  const auto collar = [&] {
    if (spec.collar_length) return *spec.collar_length;
    if (default_collar) return *default_collar;
    throw ConfigError("profile needs a collar_length");
  };
  try {
    switch (spec.kind) {
    case ProfileKind::constant_cone: return WarpProfile::constant_cone(spec.rho0, collar());
    case ProfileKind::round_sphere: return WarpProfile::round_sphere(spec.radius, collar());
    case ProfileKind::spheroid: return WarpProfile::spheroid(spec.equatorial_radius, spec.polar_radius, collar());
    case ProfileKind::teardrop: return WarpProfile::teardrop(spec.beta, collar(), spec.outer_rho);
    case ProfileKind::tabulated: return WarpProfile::tabulated(spec.table_x, spec.table_rho);
    }
  } catch (const conelab::Error& e) {
    throw ConfigError(fmt::format("geometry: {}", e.what()));
  }
  throw ConfigError("geometry: unknown profile kind");
}

geometry::SurfaceOfRevolution build_surface(const GeometryConfig& cfg) {
  using geometry::SurfaceOfRevolution;
  try {
    if (cfg.topology == geometry::Topology::collar) {
      return SurfaceOfRevolution::collar(build_profile(cfg.north), cfg.outer_bc);
    }
    double length = 0.0;
    if (cfg.meridian_length) {
      length = *cfg.meridian_length;
    } else {
      length = std::numbers::pi * cfg.north.radius;
    }
    const auto north = build_profile(cfg.north, 0.5 * length);
    const auto south = cfg.south ? build_profile(*cfg.south, 0.5 * length) : north;
    return SurfaceOfRevolution::closed(north, south, length);
  } catch (const conelab::Error& e) {
    throw ConfigError(fmt::format("geometry: {}", e.what()));
  }
}

geometry::CrossSectionSpectrum build_spectrum(const RunConfig& cfg) {
  try {
    if (cfg.analysis.n == 1 && cfg.analysis.spectrum.empty()) {
      const auto surface = build_surface(cfg.geometry);
      return geometry::cross_section_spectrum(surface.north(), 1, std::max(cfg.discretization.k_max, 2));
    }
    return geometry::CrossSectionSpectrum::from_table(cfg.analysis.n, cfg.analysis.spectrum);
  } catch (const conelab::Error& e) {
    throw ConfigError(fmt::format("analysis.spectrum: {}", e.what()));
  }
}

dyn::Nonlinearity build_nonlinearity(const DynamicsConfig& cfg) {
  std::vector<dyn::Coefficient> coeffs;
  try {
    for (const auto& c : cfg.nonlinearity) {
      coeffs.push_back(c.tabulated() ? dyn::Coefficient::table(c.times, c.values, c.lipschitz)
                                     : dyn::Coefficient::constant(c.constant));
    }
  } catch (const conelab::Error& e) {
    throw ConfigError(fmt::format("dynamics.nonlinearity: {}", e.what()));
  }
  return dyn::Nonlinearity(std::move(coeffs));
}

disc::RadialGrid build_grid(const RunConfig& cfg, const geometry::SurfaceOfRevolution& surface) {
  try {
    return disc::build_grid(surface, cfg.discretization.n_radial,
                            {cfg.discretization.x_min, cfg.discretization.x_min_relative});
  } catch (const conelab::Error& e) {
    throw ConfigError(fmt::format("discretization: {}", e.what()));
  }
}

ModalField initial_field(const RunConfig& cfg, const disc::RadialGrid& grid, double collar_length) {
  ModalField u(grid.size(), cfg.discretization.k_max);
  for (std::size_t j = 0; j < grid.size(); ++j) u.at(0, j) = cfg.dynamics.initial.constant;
  for (const auto& b : cfg.dynamics.initial.bumps) {
    const std::complex<double> phase = std::polar(1.0, b.phase);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double z = (grid.x()[j] - b.center * collar_length) / (b.width * collar_length);
      const double v = b.amplitude * bump(z);
      if (b.mode == 0) {
        u.at(0, j) += v * phase.real();
      } else {
        u.at(b.mode, j) += 0.5 * v * phase;
      }
    }
  }
  return u;
}

dyn::SolverConfig solver_config(const RunConfig& cfg, double gamma, double collar_length) {
  const auto& d = cfg.dynamics;
  dyn::SolverConfig s;
  s.scheme = d.scheme;
  s.dt = d.dt;
  s.t_final = d.t_final;
  s.shift = d.shift;
  s.q = cfg.analysis.q;
  s.monitor_norm = norm_config(cfg, d.monitor_s, d.monitor_p, d.monitor_gamma.value_or(gamma), collar_length);
  s.threshold = {d.threshold_a, d.threshold_b};
  s.blowup_bound = d.blowup_bound;
  s.stability_bound = d.stability_bound;
  s.theta_points = cfg.discretization.theta_points;
  s.extension = cfg.discretization.extension;
  return s;
}

std::string AnalysisResult::status() const { return window.empty() ? "EMPTY_WINDOW" : "OK"; }

AnalysisResult run_analysis(const RunConfig& cfg) {
  auto spectrum = build_spectrum(cfg);
  const auto lambda1 = spectrum.lambda1();
  if (!lambda1) throw ConfigError("analysis: the cross-section spectrum has no non-zero eigenvalue");
  const auto& a = cfg.analysis;
  AnalysisResult r{spectrum, mellin::laplacian_poles(spectrum),
                   mellin::admissible_weights(a.n, a.p, a.q, *lambda1, a.path),
                   mellin::curvature_condition(a.n, *lambda1), true, std::nullopt, std::nullopt, std::nullopt, {}};
  r.gamma_auto = !a.gamma.has_value();
  if (a.gamma) {
    r.gamma = *a.gamma;
  } else if (!r.window.empty()) {
    r.gamma = r.window.gamma_max - 1e-6;
  } else {
    r.notes.push_back("auto-max weight unavailable: empty window");
  }
  if (r.gamma) {
    try {
      r.asymptotics = mellin::bilaplacian_asymptotics(spectrum, *r.gamma);
      const std::set<int> active(cfg.fit.active_modes.begin(), cfg.fit.active_modes.end());
      r.prediction = mellin::predicted_deviation_exponent(*r.asymptotics, *r.gamma, a.q, a.epsilon, active);
    } catch (const conelab::Error& e) {
      r.notes.push_back(e.what());
    }
  }
  return r;
}

json analysis_json(const AnalysisResult& r, const std::string& hash) {
  json j;
  j["manifest_hash"] = hash;
  j["status"] = r.status();
  json poles = json::array();
  for (const auto& e : r.poles.entries) {
    json entry{{"mode", e.mode}, {"lambda", e.lambda}};
    json list = json::array();
    for (std::size_t i = 0; i < e.poles.size(); ++i) {
      list.push_back({{"re", e.poles[i].real()}, {"im", e.poles[i].imag()}, {"multiplicity", e.multiplicities[i]}});
    }
    entry["poles"] = list;
    poles.push_back(entry);
  }
  j["poles"] = poles;
  const auto& w = r.window;
  j["window"] = {{"gamma_min", w.gamma_min},
                 {"gamma_max", w.gamma_max},
                 {"empty", w.empty()},
                 {"q_constraint", w.q_constraint},
                 {"p_constraint", w.p_constraint},
                 {"admissible", w.admissible()},
                 {"n", w.n},
                 {"p", w.p},
                 {"q", w.q},
                 {"lambda1", w.lambda1},
                 {"path", w.path == mellin::WeightPath::evolution ? "evolution" : "laplacian"}};
  j["curvature_condition"] = r.curvature_condition;
  j["gamma"] = {{"requested", r.gamma_auto ? json("auto-max") : json(*r.gamma)},
                {"resolved", r.gamma ? json(*r.gamma) : json(nullptr)}};
  if (r.asymptotics) {
    const auto& t = *r.asymptotics;
    json terms = json::array();
    for (const auto& term : t.terms) {
      terms.push_back({{"rho_re", term.rho.real()},
                       {"rho_im", term.rho.imag()},
                       {"exponent", term.exponent()},
                       {"log_power", term.log_power},
                       {"mode", term.mode},
                       {"zero_order", term.zero_order}});
    }
    json roots = json::array();
    for (const auto& [mode, root] : t.indicial_roots) roots.push_back({{"mode", mode}, {"exponent", root}});
    j["template"] = {{"strip_lo", t.strip_lo},   {"strip_hi", t.strip_hi},       {"has_constants", t.has_constants},
                     {"terms", terms},           {"indicial_roots", roots},      {"diagnostics", t.diagnostics}};
  } else {
    j["template"] = nullptr;
  }
  if (r.prediction) {
    const auto& p = *r.prediction;
    json modes = json::array();
    for (const auto& m : p.mode_exponents) {
      modes.push_back({{"mode", m.mode}, {"exponent", m.exponent}, {"from_template", m.from_template}});
    }
    j["prediction"] = {{"alpha_pred", p.alpha_pred},
                       {"delta", p.delta},
                       {"gamma", p.gamma},
                       {"q", p.q},
                       {"epsilon", p.epsilon},
                       {"mode_exponents", modes},
                       {"leading_exponent", p.leading_exponent ? json(*p.leading_exponent) : json(nullptr)},
                       {"active_modes", std::vector<int>(p.active_modes.begin(), p.active_modes.end())}};
  } else {
    j["prediction"] = nullptr;
  }
  j["notes"] = r.notes;
  return j;
}

SimulationResult run_simulation(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  if (cfg.analysis.n != 1) {
    throw ConfigError("simulate: only n = 1 cross sections can be evolved");
  }
  const auto started = std::chrono::steady_clock::now();
  const auto hash = config_hash(cfg);
  const auto analysis = run_analysis(cfg);
  if (!analysis.gamma) {
    throw ConfigError("simulate: the weight window is empty; set analysis.gamma explicitly");
  }
  const auto surface = build_surface(cfg.geometry);
  const double collar = surface.collar_length();
  const auto grid = build_grid(cfg, surface);
  const auto nl = build_nonlinearity(cfg.dynamics);
  const auto scfg = solver_config(cfg, *analysis.gamma, collar);
  const dyn::Integrator integrator(grid, surface, cfg.discretization.k_max, nl, scfg);
  const int k_max = cfg.discretization.k_max;

  // Extra norms reported per step.
  std::vector<norms::MellinNormConfig> extra;
  for (const auto& n : cfg.output.norms) {
    extra.push_back(norm_config(cfg, n.s, n.p, n.gamma.value_or(*analysis.gamma), collar));
  }
  const norms::NormContext ctx{grid, surface, integrator.transform()};

  std::ofstream snapshots, monitor;
  if (out_dir) {
    snapshots = open_out(*out_dir / "snapshots.csv");
    monitor = open_out(*out_dir / "monitor.csv");
    snapshots << "# manifest_hash=" << hash << "\n";
    snapshots << "t,x,k,re,im\n";
    monitor << "# manifest_hash=" << hash << "\n";
    monitor << "t,K_running,F_norm,c0,c0_valid";
    for (const auto& n : cfg.output.norms) monitor << "," << n.name;
    monitor << "\n";
  }

  SimulationResult result(grid);
  result.gamma = *analysis.gamma;
  result.gamma_auto = analysis.gamma_auto;
  result.theta_points = integrator.transform().theta_size();
  result.hash = hash;
  std::size_t last_snapshot = static_cast<std::size_t>(-1);
  const auto write_snapshot = [&](const dyn::RunState& s) {
    if (s.steps == last_snapshot) return;
    last_snapshot = s.steps;
    result.snapshot_times.push_back(s.t);
    if (!out_dir) return;
    const auto t = g17(s.t);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto x = g17(grid.x()[j]);
      for (int k = 0; k <= k_max; ++k) {
        const auto v = s.u.at(k, j);
        snapshots << t << ',' << x << ',' << k << ',' << g17(v.real()) << ',' << g17(v.imag()) << '\n';
      }
    }
  };
  const auto write_monitor = [&](const dyn::RunState& s) {
    if (!out_dir) return;
    const auto& tip = s.tip_trace.back();
    monitor << g17(s.t) << ',' << g17(s.monitor.value()) << ',' << g17(s.last_f_norm) << ',' << g17(tip.c0) << ','
            << (tip.valid ? 1 : 0);
    for (const auto& n : extra) monitor << ',' << g17(norms::mellin_norm(s.u, ctx, n));
    monitor << '\n';
  };

  auto state = integrator.initialize(initial_field(cfg, grid, collar));
  state.last_f_norm = integrator.monitor_norm(integrator.evaluate_F(state.u, 0.0));
  write_snapshot(state);
  write_monitor(state);
  const std::size_t stride =
      cfg.output.snapshot_every > 0.0
          ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.output.snapshot_every / cfg.dynamics.dt)))
          : 0;
  const std::size_t total = integrator.step_count();
  integrator.run(state, [&](const dyn::RunState& s) {
    // The final row is written after the monitor integral is closed.
    if (s.steps < total) write_monitor(s);
    if (stride > 0 && s.steps % stride == 0) write_snapshot(s);
  });
  write_snapshot(state);
  write_monitor(state);

  result.state = std::move(state);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const auto& s = result.state;

  if (out_dir) {
    json m;
    m["manifest_hash"] = hash;
    m["config"] = serialize_config(cfg);
    m["gamma"] = {{"requested", result.gamma_auto ? json("auto-max") : json(result.gamma)},
                  {"resolved", result.gamma},
                  {"gamma_max", analysis.window.gamma_max},
                  {"rule", result.gamma_auto ? "gamma_max - 1e-6" : "explicit"}};
    m["grid"] = {{"n_radial", grid.size()},        {"x_min", grid.x_min()},
                 {"x_max", grid.x_max()},          {"spacing", grid.spacing()},
                 {"k_max", k_max},                 {"theta_points", result.theta_points},
                 {"topology", std::string(geometry::to_string(surface.topology()))},
                 {"collar_length", collar}};
    m["run"] = {{"steps", s.steps},
                {"t_reached", s.t},
                {"t_final", cfg.dynamics.t_final},
                {"K_running", number_or_null(s.monitor.value())},
                {"snapshots", result.snapshot_times.size()}};
    m["halt"] = {{"verdict", s.halted() && !result.solver_failed() ? "HALT-GRACEFUL" : (result.solver_failed() ? "FAILED" : "CONTINUE")},
                 {"reason", std::string(dyn::to_string(s.halt))},
                 {"detail", s.halt_detail}};
    m["outputs"] = {"snapshots.csv", "monitor.csv"};
    m["wall_time_seconds"] = result.wall_seconds;
    write_text(*out_dir / "manifest.json", m.dump(2) + "\n");
  }
  return result;
}

SnapshotSet read_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read snapshot file '{}'", path.string()));
  SnapshotSet set;
  std::map<double, std::vector<std::tuple<double, int, double, double>>> rows;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  int k_max = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# manifest_hash=";
      if (line.rfind(key, 0) == 0) set.hash = line.substr(key.size());
      continue;
    }
    if (!header) {
      if (line != "t,x,k,re,im") {
        throw std::runtime_error(fmt::format("{}:{}: expected header 't,x,k,re,im'", path.string(), number));
      }
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) {
      throw std::runtime_error(fmt::format("{}:{}: expected 5 columns, found {}", path.string(), number, cells.size()));
    }
    try {
      const double t = std::stod(cells[0]);
      const int k = std::stoi(cells[2]);
      if (k < 0) throw std::invalid_argument("negative mode");
      k_max = std::max(k_max, k);
      rows[t].emplace_back(std::stod(cells[1]), k, std::stod(cells[3]), std::stod(cells[4]));
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("{}:{}: malformed row '{}'", path.string(), number, line));
    }
  }
  if (rows.empty()) throw std::runtime_error(fmt::format("{}: no snapshot rows", path.string()));
  for (const auto& [t, list] : rows) {
    std::vector<double> xs;
    for (const auto& r : list) {
      if (xs.empty() || xs.back() != std::get<0>(r)) xs.push_back(std::get<0>(r));
    }
    if (set.x.empty()) set.x = xs;
    if (xs != set.x || list.size() != xs.size() * static_cast<std::size_t>(k_max + 1)) {
      throw std::runtime_error(fmt::format("{}: snapshot at t = {} does not match the radial grid", path.string(), t));
    }
    ModalField u(xs.size(), k_max);
    std::size_t j = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0 && std::get<0>(list[i]) != std::get<0>(list[i - 1])) ++j;
      u.at(std::get<1>(list[i]), j) = {std::get<2>(list[i]), std::get<3>(list[i])};
    }
    set.times.push_back(t);
    set.fields.push_back(std::move(u));
  }
  return set;
}

FitResult fit_field(const RunConfig& cfg, const AnalysisResult& analysis, const ModalField& u,
                    std::span<const double> x, double time) {
  FitResult out;
  out.policy.x_lo = cfg.fit.x_lo;
  out.policy.x_hi = cfg.fit.x_hi;
  out.policy.lo_factor = cfg.fit.lo_factor;
  out.policy.hi_fraction = cfg.fit.hi_fraction;
  const auto surface = build_surface(cfg.geometry);
  const auto c0 = fit::extract_tip_constant(u, x);
  const std::set<int> active(cfg.fit.active_modes.begin(), cfg.fit.active_modes.end());
  for (int k : active) {
    if (k > u.k_max()) throw ConfigError(fmt::format("fit.active_modes: mode {} is not in the snapshot", k));
  }
  out.report = fit::fit_deviation_exponent(u, x, surface.collar_length(), c0.value, out.policy, active);
  out.report.time = time;
  out.report.c0_valid = c0.valid;
  out.report.tolerance = cfg.fit.tolerance;
  out.prediction = analysis.prediction;
  if (out.prediction) {
    fit::compare_with_prediction(out.report, *out.prediction, cfg.fit.tolerance, out.policy);
  } else {
    out.report.verdict = fit::Verdict::inconclusive;
    out.report.notes.push_back("no prediction available for this configuration");
  }
  return out;
}

json fit_json(const FitResult& fit, const std::string& hash) {
  const auto& r = fit.report;
  json modes = json::array();
  for (const auto& m : r.modes) {
    modes.push_back({{"mode", m.mode},
                     {"alpha", number_or_null(m.alpha)},
                     {"stderr", number_or_null(m.stderr)},
                     {"r2", number_or_null(m.r2)},
                     {"oracle", m.oracle ? json(*m.oracle) : json(nullptr)},
                     {"within_tolerance", m.within_tolerance}});
  }
  json j{{"manifest_hash", hash},
         {"time", r.time},
         {"c0", number_or_null(r.c0)},
         {"c0_valid", r.c0_valid},
         {"window", {{"x_lo", r.x_lo}, {"x_hi", r.x_hi}, {"shells", r.shells}}},
         {"alpha_dev", number_or_null(r.alpha_dev)},
         {"alpha_dev_stderr", number_or_null(r.alpha_dev_stderr)},
         {"r2", number_or_null(r.r2)},
         {"modes", modes},
         {"alpha_pred", r.alpha_pred ? json(*r.alpha_pred) : json(nullptr)},
         {"tolerance", r.tolerance},
         {"verdict", std::string(fit::to_string(r.verdict))},
         {"notes", r.notes}};
  if (fit.prediction) {
    j["leading_exponent"] = fit.prediction->leading_exponent ? json(*fit.prediction->leading_exponent) : json(nullptr);
    j["gamma"] = fit.prediction->gamma;
  }
  return j;
}

void write_fit(const FitResult& fit, const std::string& hash, const std::filesystem::path& out_dir) {
  write_text(out_dir / "fit_report.json", fit_json(fit, hash).dump(2) + "\n");
  auto out = open_out(out_dir / "shells.csv");
  out << "# manifest_hash=" << hash << "\n";
  out << "x,deviation,in_window";
  const auto& shells = fit.report.shell_data;
  const std::size_t modes = shells.empty() ? 0 : shells.front().mode_abs.size();
  for (std::size_t k = 0; k < modes; ++k) out << ",mode_" << k;
  out << "\n";
  for (const auto& s : shells) {
    out << g17(s.x) << ',' << g17(s.deviation) << ',' << (s.in_window ? 1 : 0);
    for (double v : s.mode_abs) out << ',' << g17(v);
    out << '\n';
  }
}

std::shared_ptr<const dyn::ManufacturedSolution> manufactured_solution(const RunConfig& cfg) {
  if (!cfg.mms) throw ConfigError("mms: configuration has no 'mms' block");
  const auto& m = *cfg.mms;
  if (m.solution == "constant") return std::make_shared<dyn::ConstantSolution>(m.value);
  if (m.solution == "sphere-zonal") {
    if (cfg.geometry.north.kind != geometry::ProfileKind::round_sphere) {
      throw ConfigError("mms.solution: sphere-zonal needs a round-sphere geometry");
    }
    return std::make_shared<dyn::SphereZonalSolution>(cfg.geometry.north.radius);
  }
  if (cfg.geometry.north.kind != geometry::ProfileKind::constant_cone) {
    throw ConfigError("mms.solution: cone-power needs a constant-cone geometry");
  }
  if (m.mode < 0 || m.mode > cfg.discretization.k_max) {
    throw ConfigError("mms.mode: must lie in 0..discretization.k_max");
  }
  std::vector<std::pair<double, double>> terms;
  for (std::size_t i = 0; i < m.exponents.size(); ++i) terms.emplace_back(m.exponents[i], m.coefficients[i]);
  return std::make_shared<dyn::ConePowerSolution>(cfg.geometry.north.rho0, m.mode, std::move(terms));
}

dyn::MmsTable run_mms(const RunConfig& cfg) {
  const auto solution = manufactured_solution(cfg);
  const auto& m = *cfg.mms;
  const auto analysis = run_analysis(cfg);
  if (!analysis.gamma) throw ConfigError("mms: the weight window is empty; set analysis.gamma explicitly");
  const auto surface = build_surface(cfg.geometry);
  dyn::MmsLadder ladder;
  ladder.n_radial = m.n_radial;
  ladder.spatial_dt = m.spatial_dt;
  ladder.spatial_t_final = m.spatial_t_final;
  ladder.dts = m.dts;
  ladder.temporal_n = m.temporal_n;
  ladder.temporal_t_final = m.temporal_t_final;
  ladder.k_max = cfg.discretization.k_max;
  return dyn::mms_run(solution, surface, build_nonlinearity(cfg.dynamics),
                      solver_config(cfg, *analysis.gamma, surface.collar_length()), ladder);
}

void write_mms(const dyn::MmsTable& table, const std::string& hash, const std::filesystem::path& out_dir) {
  auto out = open_out(out_dir / "mms.csv");
  out << "# manifest_hash=" << hash << "\n";
  out << "ladder,n_radial,dt,linf_error,norm_error,spurious_mode_max\n";
  json rows = json::array();
  for (const auto& r : table.rows) {
    out << r.ladder << ',' << r.n_radial << ',' << g17(r.dt) << ',' << g17(r.linf_error) << ',' << g17(r.norm_error)
        << ',' << g17(r.spurious_mode_max) << '\n';
    rows.push_back({{"ladder", r.ladder},
                    {"n_radial", r.n_radial},
                    {"dt", r.dt},
                    {"linf_error", number_or_null(r.linf_error)},
                    {"norm_error", number_or_null(r.norm_error)},
                    {"spurious_mode_max", number_or_null(r.spurious_mode_max)}});
  }
  json j{{"manifest_hash", hash},
         {"solution", table.solution},
         {"spatial_order", number_or_null(table.spatial_order)},
         {"temporal_order", number_or_null(table.temporal_order)},
         {"spurious_mode_max", number_or_null(table.spurious_mode_max)},
         {"rows", rows}};
  write_text(out_dir / "mms.json", j.dump(2) + "\n");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
}

} // namespace conelab::app
