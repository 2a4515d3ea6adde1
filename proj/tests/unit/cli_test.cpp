#include <conelab/app/commands.hpp>
#include <conelab/app/config.hpp>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace conelab::app;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = CONELAB_SCENARIO_DIR;

/// Fresh scratch directory per call, removed by the destructor.
struct Scratch {
  fs::path dir;
  Scratch() {
    static std::atomic<int> counter{0};
    dir = fs::temp_directory_path() / ("conelab-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

struct Outcome {
  int code;
  std::string log;
  std::string err;
};

Outcome run(const std::string& command, const fs::path& config, const fs::path& out,
            std::vector<std::string> overrides = {}) {
  CommandOptions o;
  o.config = config.string();
  o.out = out.string();
  o.overrides = std::move(overrides);
  std::ostringstream log, err;
  const int code = run_command(command, o, log, err);
  return {code, log.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

constexpr const char* kCone = R"(geometry:
  topology: collar
  outer_bc: neumann
  north:
    kind: constant-cone
    rho0: 0.3333333333333333
    collar_length: 1
discretization:
  n_radial: 64
  k_max: 2
dynamics:
  nonlinearity: [0]
  initial:
    constant: 0.75
  dt: 1.0e-2
  t_final: 0.2
output:
  snapshot_every: 0.05
  norms:
    - {name: L2, s: 0, p: 2}
    - {name: H1, s: 1, p: 4}
)";

} // namespace

TEST_CASE("analyze reports the weight window") {
  Scratch s;
  const auto cfg = s.write("cone.yaml", kCone);
  const auto r = run("analyze", cfg, s.dir / "a");
  CHECK(r.code == exit_ok);
  CHECK(r.log.find("status OK") != std::string::npos);
  const auto j = read_json(s.dir / "a" / "analysis.json");
  CHECK(j["status"] == "OK");
  CHECK(j["window"]["gamma_min"].get<double>() == doctest::Approx(-0.5));
  CHECK(j["window"]["gamma_max"].get<double>() == doctest::Approx(1.0));
  CHECK(j["curvature_condition"] == true);
  CHECK(j["gamma"]["requested"] == "auto-max");
  CHECK(j["gamma"]["resolved"].get<double>() == doctest::Approx(1.0 - 1e-6).epsilon(1e-12));
  CHECK(j["manifest_hash"] == config_hash(load_config(cfg.string())));
  CHECK(j.contains("poles"));
  CHECK(j.contains("template"));
  CHECK(j["prediction"]["alpha_pred"].get<double>() == doctest::Approx(2.0).epsilon(1e-5));
}

TEST_CASE("analyze on a smooth sphere pole and on an empty window") {
  Scratch s;
  const auto sphere = run("analyze", kScenarios / "sphere_mms.yaml", s.dir / "sphere");
  CHECK(sphere.code == exit_ok);
  CHECK(read_json(s.dir / "sphere" / "analysis.json")["curvature_condition"] == false);

  const auto cfg = s.write("wide.yaml", kCone);
  const auto empty = run("analyze", cfg, s.dir / "wide", {"geometry.north.rho0=10"});
  CHECK(empty.code == exit_ok);
  CHECK(empty.log.find("EMPTY_WINDOW") != std::string::npos);
  const auto j = read_json(s.dir / "wide" / "analysis.json");
  CHECK(j["status"] == "EMPTY_WINDOW");
  CHECK(j["gamma"]["resolved"].is_null());

  // Simulation needs a weight.
  CHECK(run("simulate", cfg, s.dir / "wide", {"geometry.north.rho0=10"}).code == exit_input_error);
}

TEST_CASE("invalid configurations exit with an input error naming the field") {
  Scratch s;
  const auto cfg = s.write("bad.yaml", std::string(kCone) + "fit:\n  tolerence: 0.1\n");
  const auto r = run("analyze", cfg, s.dir);
  CHECK(r.code == exit_input_error);
  CHECK(r.err.find("fit.tolerence") != std::string::npos);
  CHECK(r.err.find("line 23") != std::string::npos);
  CHECK(run("analyze", s.dir / "missing.yaml", s.dir).code == exit_input_error);
  CHECK(run("frobnicate", cfg, s.dir).code == exit_input_error);
}

TEST_CASE("simulate with F = 0 keeps every snapshot spatially constant") {
  Scratch s;
  const auto cfg = s.write("cone.yaml", kCone);
  const auto r = run("simulate", cfg, s.dir / "sim");
  REQUIRE(r.code == exit_ok);

  const auto hash = config_hash(load_config(cfg.string()));
  for (const char* name : {"snapshots.csv", "monitor.csv"}) CHECK(first_line(s.dir / "sim" / name) == "# manifest_hash=" + hash);
  const auto manifest = read_json(s.dir / "sim" / "manifest.json");
  CHECK(manifest["manifest_hash"] == hash);
  CHECK(manifest["halt"]["verdict"] == "CONTINUE");
  CHECK(manifest["gamma"]["rule"] == "gamma_max - 1e-6");
  CHECK(manifest["grid"]["n_radial"] == 64);
  CHECK(manifest.contains("wall_time_seconds"));

  std::ifstream in(s.dir / "sim" / "snapshots.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "t,x,k,re,im");
  std::map<double, std::pair<double, double>> range;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    double t, x, re, im;
    int k;
    char c;
    std::istringstream row(line);
    row >> t >> c >> x >> c >> k >> c >> re >> c >> im;
    REQUIRE(row);
    ++rows;
    if (k > 0) {
      CHECK(std::abs(re) < 1e-12);
      CHECK(std::abs(im) < 1e-12);
      continue;
    }
    CHECK(std::abs(im) < 1e-12);
    auto [it, fresh] = range.try_emplace(t, re, re);
    it->second.first = std::min(it->second.first, re);
    it->second.second = std::max(it->second.second, re);
  }
  CHECK(range.size() == 5);
  CHECK(rows == 5 * 64 * 3);
  for (const auto& [t, mm] : range) {
    CHECK(mm.second - mm.first < 1e-12);
    // (Delta + 1)^2 c = c, so constants decay like e^{-t}.
    CHECK(mm.first == doctest::Approx(0.75 * std::exp(-t)).epsilon(1e-3));
  }

  // Monitor columns: one per configured norm.
  std::ifstream mon(s.dir / "sim" / "monitor.csv");
  std::getline(mon, line);
  std::getline(mon, line);
  CHECK(line == "t,K_running,F_norm,c0,c0_valid,L2,H1");
}

TEST_CASE("outputs are byte-identical across runs") {
  Scratch s;
  const auto cfg = s.write("cone.yaml", kCone);
  const std::vector<std::string> seeded{"dynamics.nonlinearity=[0, 1, 0, -1]",
                                        "dynamics.initial.bumps=[{mode: 1, amplitude: 0.5}]"};
  REQUIRE(run("simulate", cfg, s.dir / "a", seeded).code == exit_ok);
  REQUIRE(run("simulate", cfg, s.dir / "b", seeded).code == exit_ok);
  for (const char* name : {"snapshots.csv", "monitor.csv"}) CHECK(slurp(s.dir / "a" / name) == slurp(s.dir / "b" / name));
  auto ma = read_json(s.dir / "a" / "manifest.json");
  auto mb = read_json(s.dir / "b" / "manifest.json");
  ma.erase("wall_time_seconds");
  mb.erase("wall_time_seconds");
  CHECK(ma.dump() == mb.dump());

  REQUIRE(run("fit", cfg, s.dir / "a", seeded).code == exit_ok);
  REQUIRE(run("fit", cfg, s.dir / "b", seeded).code == exit_ok);
  CHECK(slurp(s.dir / "a" / "fit_report.json") == slurp(s.dir / "b" / "fit_report.json"));
  CHECK(slurp(s.dir / "a" / "shells.csv") == slurp(s.dir / "b" / "shells.csv"));
}

TEST_CASE("fit writes the report and shell data") {
  Scratch s;
  const auto scenario = kScenarios / "cone_constant_data.yaml";
  REQUIRE(run("simulate", scenario, s.dir).code == exit_ok);
  const auto r = run("fit", scenario, s.dir);
  REQUIRE(r.code == exit_ok);
  CHECK(r.log.find("verdict PASS") != std::string::npos);

  const auto j = read_json(s.dir / "fit_report.json");
  const auto hash = config_hash(load_config(scenario.string()));
  CHECK(j["manifest_hash"] == hash);
  CHECK(j["verdict"] == "PASS");
  CHECK(j["time"].get<double>() == doctest::Approx(2.0));
  CHECK(j["alpha_dev"].get<double>() == doctest::Approx(2.0).epsilon(0.075));
  CHECK(j["alpha_pred"].get<double>() == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(j["r2"].get<double>() >= 0.98);
  CHECK(j["window"]["shells"].get<int>() >= 8);
  CHECK(j["modes"].at(0)["mode"] == 0);
  // Keys come out sorted.
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(std::is_sorted(keys.begin(), keys.end()));

  std::ifstream shells(s.dir / "shells.csv");
  std::string line;
  std::getline(shells, line);
  CHECK(line == "# manifest_hash=" + hash);
  std::getline(shells, line);
  CHECK(line == "x,deviation,in_window,mode_0");
  std::size_t rows = 0, in_window = 0;
  while (std::getline(shells, line)) {
    ++rows;
    if (line.find(",1,") != std::string::npos) ++in_window;
  }
  CHECK(rows > 100);
  CHECK(in_window == j["window"]["shells"].get<std::size_t>());

  // An earlier snapshot.
  CommandOptions o;
  o.config = scenario.string();
  o.out = s.dir.string();
  o.time = 0.5;
  std::ostringstream log, err;
  CHECK(run_command("fit", o, log, err) == exit_ok);
  CHECK(read_json(s.dir / "fit_report.json")["time"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("fit rejects malformed snapshots") {
  Scratch s;
  const auto cfg = s.write("cone.yaml", kCone);
  const auto bad = s.write("snap.csv", "# manifest_hash=abc\nt,x,k,re\n0,1,0,1\n");
  CommandOptions o;
  o.config = cfg.string();
  o.out = s.dir.string();
  o.snapshots = bad.string();
  std::ostringstream log, err;
  CHECK(run_command("fit", o, log, err) == exit_input_error);
  CHECK(err.str().find("snap.csv:2") != std::string::npos);
}

TEST_CASE("focusing scenario halts gracefully") {
  Scratch s;
  const auto r = run("simulate", kScenarios / "sphere_focusing.yaml", s.dir);
  CHECK(r.code == exit_ok);
  CHECK(r.log.find("HALT-GRACEFUL") != std::string::npos);
  const auto m = read_json(s.dir / "manifest.json");
  CHECK(m["halt"]["verdict"] == "HALT-GRACEFUL");
  CHECK(m["halt"]["reason"] == "k-threshold");
  CHECK(m["run"]["t_reached"].get<double>() < 1.0);
}

TEST_CASE("mms writes its tables") {
  Scratch s;
  const auto r = run("mms", kScenarios / "sphere_mms.yaml", s.dir,
                     {"mms.n_radial=[32, 64, 128]", "mms.spatial_t_final=0.005", "mms.temporal_n=64",
                      "mms.temporal_t_final=0.05"});
  REQUIRE(r.code == exit_ok);
  const auto j = read_json(s.dir / "mms.json");
  CHECK(j["solution"] == "sphere-zonal");
  CHECK(j["spatial_order"].get<double>() > 3.0);
  CHECK(j["rows"].size() == 6);
  CHECK(first_line(s.dir / "mms.csv").rfind("# manifest_hash=", 0) == 0);
}

TEST_CASE("verify on a one-entry suite") {
  Scratch s;
  const auto suite = s.write("suite.yaml", "criteria:\n  - criterion: 3\n");
  const auto r = run("verify", suite, s.dir / "v");
  CHECK(r.code == exit_ok);
  const auto j = read_json(s.dir / "v" / "results.json");
  CHECK(j["results"].size() == 1);
  CHECK(j["results"][0]["criterion"] == 3);
  CHECK(j["results"][0]["status"] == "PASS");
  CHECK(j["pass"] == true);
  std::ifstream csv(s.dir / "v" / "results.csv");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 3);
  CHECK(first_line(s.dir / "v" / "results.csv") == "# manifest_hash=" + sha256_hex(slurp(suite)));
}

TEST_CASE("malformed suites name the offending entry") {
  Scratch s;
  const auto no_scenario = s.write("a.yaml", "criteria:\n  - criterion: 1\n  - criterion: 5\n");
  auto r = run("verify", no_scenario, s.dir);
  CHECK(r.code == exit_input_error);
  CHECK(r.err.find("criteria[1] (line 3)") != std::string::npos);

  const auto missing = s.write("b.yaml", "criteria:\n  - criterion: 4\n    scenario: nowhere.yaml\n");
  r = run("verify", missing, s.dir);
  CHECK(r.code == exit_input_error);
  CHECK(r.err.find("nowhere.yaml") != std::string::npos);

  const auto unknown = s.write("c.yaml", "criteria:\n  - criterion: 12\n");
  CHECK(run("verify", unknown, s.dir).err.find("criteria[0]") != std::string::npos);

  const auto extra = s.write("d.yaml", "criteria:\n  - {criterion: 2, scenaro: x.yaml}\n");
  CHECK(run("verify", extra, s.dir).err.find("scenaro") != std::string::npos);

  const auto shape = s.write("e.yaml", "- criterion: 1\n");
  CHECK(run("verify", shape, s.dir).code == exit_input_error);
}

TEST_CASE("shipped suite lists every criterion once") {
  const auto entries = load_suite(kScenarios / "suite.yaml");
  REQUIRE(entries.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(entries[static_cast<std::size_t>(i)].criterion == i + 1);
  CHECK(entries[5].scenarios.size() == 3);
}
