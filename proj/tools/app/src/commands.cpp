#include "conelab/app/commands.hpp"

#include "conelab/app/config.hpp"
#include "conelab/app/pipeline.hpp"

#include <conelab/errors.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace conelab::app {

namespace {

using nlohmann::json;

std::filesystem::path output_dir(const CommandOptions& o, const RunConfig& cfg) {
  return o.out ? std::filesystem::path(*o.out) : std::filesystem::path(cfg.output.directory);
}

int analyze(const CommandOptions& o, std::ostream& log) {
  const auto cfg = load_config(o.config, o.overrides);
  const auto hash = config_hash(cfg);
  const auto result = run_analysis(cfg);
  const auto dir = output_dir(o, cfg);
  write_text(dir / "analysis.json", analysis_json(result, hash).dump(2) + "\n");
  fmt::print(log, "analyze: status {} window ({:.6g}, {:.6g}) curvature_condition {} -> {}\n", result.status(),
             result.window.gamma_min, result.window.gamma_max, result.curvature_condition,
             (dir / "analysis.json").string());
  return exit_ok;
}

int simulate(const CommandOptions& o, std::ostream& log, std::ostream& err) {
  const auto cfg = load_config(o.config, o.overrides);
  const auto dir = output_dir(o, cfg);
  const auto result = run_simulation(cfg, dir);
  const auto& s = result.state;
  fmt::print(log, "simulate: {} steps to t = {:.6g}, K = {:.6g}, halt {} -> {}\n", s.steps, s.t, s.monitor.value(),
             dyn::to_string(s.halt), dir.string());
  if (s.halted()) fmt::print(log, "simulate: HALT-GRACEFUL ({})\n", s.halt_detail);
  if (result.solver_failed()) {
    fmt::print(err, "simulate: solver failure: {}\n", s.halt_detail);
    return exit_failure;
  }
  return exit_ok;
}

int fit_command(const CommandOptions& o, std::ostream& log) {
  const auto cfg = load_config(o.config, o.overrides);
  const auto dir = output_dir(o, cfg);
  const auto path = o.snapshots ? std::filesystem::path(*o.snapshots) : dir / "snapshots.csv";
  const auto set = read_snapshots(path);
  std::size_t pick = set.times.size() - 1;
  if (o.time) {
    for (std::size_t i = 0; i < set.times.size(); ++i) {
      if (std::abs(set.times[i] - *o.time) < std::abs(set.times[pick] - *o.time)) pick = i;
    }
  }
  const auto analysis = run_analysis(cfg);
  const auto result = fit_field(cfg, analysis, set.fields[pick], set.x, set.times[pick]);
  const auto hash = set.hash.empty() ? config_hash(cfg) : set.hash;
  write_fit(result, hash, dir);
  fmt::print(log, "fit: t = {:.6g} alpha_dev = {:.4f} (R^2 {:.5f}, {} shells) verdict {} -> {}\n", set.times[pick],
             result.report.alpha_dev, result.report.r2, result.report.shells, fit::to_string(result.report.verdict),
             (dir / "fit_report.json").string());
  return exit_ok;
}

int mms_command(const CommandOptions& o, std::ostream& log) {
  const auto cfg = load_config(o.config, o.overrides);
  const auto dir = output_dir(o, cfg);
  const auto table = run_mms(cfg);
  write_mms(table, config_hash(cfg), dir);
  fmt::print(log, "mms: {} spatial order {:.3f}, temporal order {:.3f} -> {}\n", table.solution, table.spatial_order,
             table.temporal_order, (dir / "mms.json").string());
  return exit_ok;
}

int verify(const CommandOptions& o, std::ostream& log) {
  const auto entries = load_suite(o.config);
  std::ifstream in(o.config);
  std::stringstream text;
  text << in.rdbuf();
  const auto hash = sha256_hex(text.str());
  const auto dir = o.out ? std::filesystem::path(*o.out) : std::filesystem::path("out");

  json rows = json::array();
  std::ostringstream csv;
  csv << "# manifest_hash=" << hash << "\n";
  csv << "criterion,name,status,value,seconds\n";
  bool all = true;
  for (const auto& entry : entries) {
    const auto r = evaluate(entry);
    all = all && r.pass;
    fmt::print(log, "{}\n", format_result(r));
    rows.push_back({{"criterion", r.id},
                    {"name", r.name},
                    {"status", r.pass ? "PASS" : "FAIL"},
                    {"value", r.value},
                    {"detail", r.detail},
                    {"seconds", r.seconds}});
    csv << r.id << ',' << r.name << ',' << (r.pass ? "PASS" : "FAIL") << ",\"" << r.value << "\","
        << fmt::format("{:.3f}", r.seconds) << '\n';
  }
  write_text(dir / "results.json", json{{"manifest_hash", hash}, {"results", rows}, {"pass", all}}.dump(2) + "\n");
  write_text(dir / "results.csv", csv.str());
  fmt::print(log, "verify: {} of {} criteria passed\n", std::count_if(rows.begin(), rows.end(), [](const json& r) {
               return r["status"] == "PASS";
             }),
             rows.size());
  return all ? exit_ok : exit_failure;
}

} // namespace

std::vector<SuiteEntry> load_suite(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError(fmt::format("cannot read suite file '{}'", path.string()));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}: YAML syntax error at line {}: {}", path.string(), e.mark.line + 1, e.msg));
  }
  if (!root.IsMap() || !root["criteria"] || !root["criteria"].IsSequence()) {
    throw ConfigError(fmt::format("{}: a suite is a mapping with a 'criteria' list", path.string()));
  }
  for (const auto& kv : root) {
    if (kv.first.as<std::string>() != "criteria") {
      throw ConfigError(fmt::format("{}: unknown key '{}' (line {})", path.string(), kv.first.as<std::string>(),
                                    kv.first.Mark().line + 1));
    }
  }
  const auto base = path.parent_path();
  const std::set<int> with_one{4, 5, 9};
  std::vector<SuiteEntry> out;
  const auto list = root["criteria"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto node = list[i];
    const auto name = fmt::format("{}: criteria[{}] (line {})", path.string(), i, node.Mark().line + 1);
    if (!node.IsMap()) throw ConfigError(fmt::format("{} must be a mapping", name));
    SuiteEntry e;
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (key != "criterion" && key != "scenario" && key != "scenarios") {
        throw ConfigError(fmt::format("{}: unknown key '{}'", name, key));
      }
    }
    try {
      e.criterion = node["criterion"].as<int>();
    } catch (const YAML::Exception&) {
      throw ConfigError(fmt::format("{}: 'criterion' must be an integer 1..9", name));
    }
    if (e.criterion < 1 || e.criterion > 9) {
      throw ConfigError(fmt::format("{}: unknown criterion {}", name, e.criterion));
    }
    try {
      if (node["scenario"]) e.scenarios.push_back(base / node["scenario"].as<std::string>());
      if (node["scenarios"]) {
        for (const auto& s : node["scenarios"]) e.scenarios.push_back(base / s.as<std::string>());
      }
    } catch (const YAML::Exception&) {
      throw ConfigError(fmt::format("{}: scenario entries must be file names", name));
    }
    const bool needs_one = with_one.count(e.criterion) > 0;
    if (needs_one && e.scenarios.size() != 1) {
      throw ConfigError(fmt::format("{}: criterion {} needs exactly one scenario", name, e.criterion));
    }
    if (e.criterion == 6 && e.scenarios.empty()) {
      throw ConfigError(fmt::format("{}: criterion 6 needs the sweep scenarios", name));
    }
    if (!needs_one && e.criterion != 6 && !e.scenarios.empty()) {
      throw ConfigError(fmt::format("{}: criterion {} takes no scenario", name, e.criterion));
    }
    for (const auto& s : e.scenarios) {
      if (!std::filesystem::exists(s)) {
        throw ConfigError(fmt::format("{}: missing scenario file '{}'", name, s.string()));
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

CriterionResult evaluate(const SuiteEntry& entry) {
  std::vector<RunConfig> scenarios;
  for (const auto& s : entry.scenarios) scenarios.push_back(load_config(s.string()));
  switch (entry.criterion) {
  case 1: return check_symbol_oracle();
  case 2: return check_weight_window();
  case 3: return check_curvature_boundary();
  case 4: return check_mms_convergence(scenarios.at(0));
  case 5: return check_constant_data_rate(scenarios.at(0));
  case 6: return check_geometry_effect(scenarios);
  case 7: return check_pointwise_bound();
  case 8: return check_sectoriality();
  case 9: return check_monitor(scenarios.at(0));
  default: break;
  }
  throw ConfigError(fmt::format("unknown criterion {}", entry.criterion));
}

int run_command(const std::string& name, const CommandOptions& options, std::ostream& log, std::ostream& err) {
  try {
    if (name == "analyze") return analyze(options, log);
    if (name == "simulate") return simulate(options, log, err);
    if (name == "fit") return fit_command(options, log);
    if (name == "mms") return mms_command(options, log);
    if (name == "verify") return verify(options, log);
    fmt::print(err, "unknown command '{}'\n", name);
    return exit_input_error;
  } catch (const ConfigError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_input_error;
  } catch (const conelab::Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_failure;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_input_error;
  }
}

} // namespace conelab::app
