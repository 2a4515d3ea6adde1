#include "conelab/app/config.hpp"

#include <conelab/errors.hpp>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace conelab::app {

namespace {

std::string where(const YAML::Node& node) {
  const auto mark = node.Mark();
  if (mark.line < 0) return "";
  return fmt::format(" (line {})", mark.line + 1);
}

/// A YAML mapping together with its dotted path, checked against a key list.
class Block {
public:
  Block(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(fmt::format("'{}'{} must be a mapping", path_, where(node_)));
    }
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; });
      if (!known) {
        throw ConfigError(fmt::format("unknown key '{}'{}", field(key), where(kv.first)));
      }
    }
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
  YAML::Node raw(const std::string& key) const { return has(key) ? node_[key] : YAML::Node(); }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  Block child(const std::string& key) const { return {raw(key), field(key)}; }

  double number(const std::string& key, double fallback) const {
    return has(key) ? as_number(node_[key], field(key)) : fallback;
  }
  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return as_number(node_[key], field(key));
  }
  double required_number(const std::string& key) const {
    if (!has(key)) throw ConfigError(fmt::format("missing required field '{}'{}", field(key), where(node_)));
    return as_number(node_[key], field(key));
  }
  int integer(const std::string& key, int fallback) const {
    return has(key) ? as_integer(node_[key], field(key)) : fallback;
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    try {
      return node_[key].as<bool>();
    } catch (const YAML::Exception&) {
      throw ConfigError(fmt::format("field '{}'{} must be true or false", field(key), where(node_[key])));
    }
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto n = node_[key];
    if (!n.IsScalar()) throw ConfigError(fmt::format("field '{}'{} must be a string", field(key), where(n)));
    return n.as<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const auto n = node_[key];
    if (!n.IsSequence()) throw ConfigError(fmt::format("field '{}'{} must be a list", field(key), where(n)));
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_number(n[i], fmt::format("{}[{}]", field(key), i)));
    return out;
  }
  std::vector<int> integers(const std::string& key, std::vector<int> fallback) const {
    if (!has(key)) return fallback;
    const auto n = node_[key];
    if (!n.IsSequence()) throw ConfigError(fmt::format("field '{}'{} must be a list", field(key), where(n)));
    std::vector<int> out;
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(as_integer(n[i], fmt::format("{}[{}]", field(key), i)));
    return out;
  }

  /// Runs `parse` on a string field, re-raising library errors with the field name.
  template <class F>
  auto choice(const std::string& key, const std::string& fallback, F parse) const {
    const auto value = text(key, fallback);
    try {
      return parse(value);
    } catch (const conelab::Error& e) {
      throw ConfigError(fmt::format("field '{}'{}: {}", field(key), where(raw(key)), e.what()));
    }
  }

  static double as_number(const YAML::Node& n, const std::string& name) {
    if (n.IsScalar()) {
      const auto s = n.Scalar();
      if (s == "inf" || s == ".inf") return std::numeric_limits<double>::infinity();
      try {
        return n.as<double>();
      } catch (const YAML::Exception&) {
      }
    }
    throw ConfigError(fmt::format("field '{}'{} must be a number", name, where(n)));
  }
  static int as_integer(const YAML::Node& n, const std::string& name) {
    if (n.IsScalar()) {
      try {
        return n.as<int>();
      } catch (const YAML::Exception&) {
      }
    }
    throw ConfigError(fmt::format("field '{}'{} must be an integer", name, where(n)));
  }

  const YAML::Node& node() const { return node_; }
  const std::string& path() const { return path_; }

private:
  YAML::Node node_;
  std::string path_;
};

void check(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(fmt::format("field '{}': {}", field, message));
}

ProfileSpec parse_profile(const Block& b) {
  ProfileSpec p;
  p.kind = b.choice("kind", "constant-cone", [](const std::string& s) { return geometry::profile_kind_from_string(s); });
  switch (p.kind) {
  case geometry::ProfileKind::constant_cone:
    b.allow({"kind", "rho0", "collar_length"});
    p.rho0 = b.required_number("rho0");
    break;
  case geometry::ProfileKind::round_sphere:
    b.allow({"kind", "radius", "collar_length"});
    p.radius = b.number("radius", 1.0);
    break;
  case geometry::ProfileKind::spheroid:
    b.allow({"kind", "equatorial_radius", "polar_radius", "collar_length"});
    p.equatorial_radius = b.required_number("equatorial_radius");
    p.polar_radius = b.required_number("polar_radius");
    break;
  case geometry::ProfileKind::teardrop:
    b.allow({"kind", "beta", "outer_rho", "collar_length"});
    p.beta = b.required_number("beta");
    p.outer_rho = b.number("outer_rho", 1.0);
    break;
  case geometry::ProfileKind::tabulated:
    b.allow({"kind", "x", "rho"});
    p.table_x = b.numbers("x", {});
    p.table_rho = b.numbers("rho", {});
    check(!p.table_x.empty() && p.table_x.size() == p.table_rho.size(), b.field("x"),
          "tabulated profiles need equally long x and rho lists");
    break;
  }
  p.collar_length = b.optional_number("collar_length");
  return p;
}

CoefficientSpec parse_coefficient(const YAML::Node& n, const std::string& name) {
  CoefficientSpec c;
  if (n.IsMap()) {
    const Block b(n, name);
    b.allow({"times", "values", "lipschitz"});
    c.times = b.numbers("times", {});
    c.values = b.numbers("values", {});
    c.lipschitz = b.required_number("lipschitz");
    check(!c.times.empty() && c.times.size() == c.values.size(), name, "times and values must have equal length");
    return c;
  }
  c.constant = Block::as_number(n, name);
  return c;
}

NormSpec parse_norm(const YAML::Node& n, const std::string& name) {
  const Block b(n, name);
  b.allow({"name", "s", "p", "gamma"});
  NormSpec spec;
  spec.s = b.integer("s", 0);
  spec.p = b.number("p", 2.0);
  spec.gamma = b.optional_number("gamma");
  spec.name = b.text("name", fmt::format("H{}_{}", spec.s, spec.p));
  return spec;
}

/// Sets `path` (dotted, list indices allowed) in `root` to the YAML value text.
void apply_override(YAML::Node root, const std::string& entry) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(fmt::format("override '{}' must have the form block.key=value", entry));
  }
  const std::string path = entry.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(entry.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("override '{}': {}", entry, e.what()));
  }
  std::vector<std::string> parts;
  std::stringstream ss(path);
  for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);
  YAML::Node node = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    const auto& part = parts[i];
    const bool index = !part.empty() && std::all_of(part.begin(), part.end(), ::isdigit);
    if (index && node.IsSequence()) {
      const auto at = std::stoul(part);
      if (at >= node.size()) throw ConfigError(fmt::format("override '{}': index {} out of range", entry, part));
      node.reset(node[at]);
    } else {
      if (!node[part]) node[part] = YAML::Node(YAML::NodeType::Map);
      node.reset(node[part]);
    }
  }
  const auto& last = parts.back();
  const bool index = !last.empty() && std::all_of(last.begin(), last.end(), ::isdigit);
  if (index && node.IsSequence()) {
    const auto at = std::stoul(last);
    if (at >= node.size()) throw ConfigError(fmt::format("override '{}': index {} out of range", entry, last));
    node[at] = value;
  } else {
    node[last] = value;
  }
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? ".inf" : "-.inf";
  auto s = fmt::format("{}", v);
  // Keep floats recognisable as floats.
  if (s.find_first_of(".eE") == std::string::npos && s.find("nan") == std::string::npos) s += ".0";
  return s;
}

void emit_numbers(YAML::Emitter& out, const std::vector<double>& values) {
  out << YAML::Flow << YAML::BeginSeq;
  for (double v : values) out << num(v);
  out << YAML::EndSeq;
}

void emit_profile(YAML::Emitter& out, const ProfileSpec& p) {
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(geometry::to_string(p.kind));
  switch (p.kind) {
  case geometry::ProfileKind::constant_cone: out << YAML::Key << "rho0" << YAML::Value << num(p.rho0); break;
  case geometry::ProfileKind::round_sphere: out << YAML::Key << "radius" << YAML::Value << num(p.radius); break;
  case geometry::ProfileKind::spheroid:
    out << YAML::Key << "equatorial_radius" << YAML::Value << num(p.equatorial_radius);
    out << YAML::Key << "polar_radius" << YAML::Value << num(p.polar_radius);
    break;
  case geometry::ProfileKind::teardrop:
    out << YAML::Key << "beta" << YAML::Value << num(p.beta);
    out << YAML::Key << "outer_rho" << YAML::Value << num(p.outer_rho);
    break;
  case geometry::ProfileKind::tabulated:
    out << YAML::Key << "x" << YAML::Value;
    emit_numbers(out, p.table_x);
    out << YAML::Key << "rho" << YAML::Value;
    emit_numbers(out, p.table_rho);
    break;
  }
  if (p.collar_length) out << YAML::Key << "collar_length" << YAML::Value << num(*p.collar_length);
  out << YAML::EndMap;
}

} // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("{}: YAML syntax error at line {}: {}", source, e.mark.line + 1, e.msg));
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  for (const auto& o : overrides) apply_override(root, o);

  try {
    RunConfig cfg;
    const Block top(root, "");
    top.allow({"geometry", "discretization", "analysis", "dynamics", "output", "fit", "mms"});

    const auto g = top.child("geometry");
    g.allow({"topology", "outer_bc", "north", "south", "meridian_length"});
    cfg.geometry.topology =
        g.choice("topology", "collar", [](const std::string& s) { return geometry::topology_from_string(s); });
    cfg.geometry.outer_bc =
        g.choice("outer_bc", "neumann", [](const std::string& s) { return geometry::outer_boundary_from_string(s); });
    check(g.has("north"), "geometry.north", "a tip profile is required");
    cfg.geometry.north = parse_profile(g.child("north"));
    if (g.has("south")) cfg.geometry.south = parse_profile(g.child("south"));
    cfg.geometry.meridian_length = g.optional_number("meridian_length");
    if (cfg.geometry.topology == geometry::Topology::collar) {
      check(cfg.geometry.north.collar_length.has_value() ||
                cfg.geometry.north.kind == geometry::ProfileKind::tabulated,
            "geometry.north.collar_length", "required on collar surfaces");
      check(!cfg.geometry.south && !cfg.geometry.meridian_length, "geometry.south",
            "south profile and meridian length apply to closed surfaces only");
    } else {
      const bool sphere = cfg.geometry.north.kind == geometry::ProfileKind::round_sphere;
      check(sphere || cfg.geometry.meridian_length.has_value(), "geometry.meridian_length",
            "required on closed surfaces unless the north profile is a round sphere");
    }

    const auto d = top.child("discretization");
    d.allow({"n_radial", "k_max", "x_min", "x_min_relative", "theta_points", "extension"});
    cfg.discretization.n_radial = d.integer("n_radial", 256);
    cfg.discretization.k_max = d.integer("k_max", 0);
    cfg.discretization.x_min = d.number("x_min", 1e-3);
    cfg.discretization.x_min_relative = d.boolean("x_min_relative", true);
    const int theta = d.integer("theta_points", 0);
    check(theta >= 0, "discretization.theta_points", "must be non-negative");
    cfg.discretization.theta_points = static_cast<std::size_t>(theta);
    cfg.discretization.extension = d.choice("extension", "chosen", [](const std::string& s) {
      if (s == "chosen") return disc::Extension::chosen;
      if (s == "minimal") return disc::Extension::minimal;
      throw ConstructionError("expected 'chosen' or 'minimal'");
    });
    check(cfg.discretization.n_radial >= 16, "discretization.n_radial", "must be at least 16");
    check(cfg.discretization.k_max >= 0, "discretization.k_max", "must be non-negative");
    check(cfg.discretization.x_min > 0.0, "discretization.x_min", "must be positive");

    const auto a = top.child("analysis");
    a.allow({"n", "p", "q", "gamma", "epsilon", "path", "spectrum"});
    cfg.analysis.n = a.integer("n", 1);
    cfg.analysis.p = a.number("p", 8.0);
    cfg.analysis.q = a.number("q", 4.0);
    if (a.has("gamma") && !(a.raw("gamma").IsScalar() && a.raw("gamma").Scalar() == "auto-max")) {
      cfg.analysis.gamma = a.required_number("gamma");
    }
    cfg.analysis.epsilon = a.number("epsilon", 0.05);
    cfg.analysis.path = a.choice("path", "evolution", [](const std::string& s) {
      if (s == "evolution") return mellin::WeightPath::evolution;
      if (s == "laplacian") return mellin::WeightPath::laplacian;
      throw ConstructionError("expected 'evolution' or 'laplacian'");
    });
    cfg.analysis.spectrum = a.numbers("spectrum", {});
    check(cfg.analysis.n >= 1, "analysis.n", "must be at least 1");
    check(cfg.analysis.n == 1 || !cfg.analysis.spectrum.empty(), "analysis.spectrum",
          "required for cross sections of dimension n > 1");
    check(cfg.analysis.p > 1.0 && std::isfinite(cfg.analysis.p), "analysis.p", "must lie in (1, inf)");
    check(cfg.analysis.q > 1.0 && std::isfinite(cfg.analysis.q), "analysis.q", "must lie in (1, inf)");
    check(cfg.analysis.epsilon > 0.0, "analysis.epsilon", "must be positive");

    const auto y = top.child("dynamics");
    y.allow({"nonlinearity", "initial", "dt", "t_final", "scheme", "shift", "threshold", "blowup_bound",
             "stability_bound", "monitor"});
    if (y.has("nonlinearity")) {
      const auto nl = y.raw("nonlinearity");
      check(nl.IsSequence(), "dynamics.nonlinearity", "must be a list of coefficients alpha_0 .. alpha_m");
      for (std::size_t i = 0; i < nl.size(); ++i) {
        cfg.dynamics.nonlinearity.push_back(parse_coefficient(nl[i], fmt::format("dynamics.nonlinearity[{}]", i)));
      }
    }
    const auto init = y.child("initial");
    init.allow({"constant", "bumps"});
    cfg.dynamics.initial.constant = init.number("constant", 0.0);
    if (init.has("bumps")) {
      const auto bumps = init.raw("bumps");
      check(bumps.IsSequence(), "dynamics.initial.bumps", "must be a list");
      for (std::size_t i = 0; i < bumps.size(); ++i) {
        const Block bb(bumps[i], fmt::format("dynamics.initial.bumps[{}]", i));
        bb.allow({"mode", "amplitude", "center", "width", "phase"});
        BumpSpec bump;
        bump.mode = bb.integer("mode", 0);
        bump.amplitude = bb.required_number("amplitude");
        bump.center = bb.number("center", 0.5);
        bump.width = bb.number("width", 0.25);
        bump.phase = bb.number("phase", 0.0);
        check(bump.mode >= 0 && bump.mode <= cfg.discretization.k_max, bb.field("mode"),
              "must lie in 0..discretization.k_max");
        check(bump.width > 0.0, bb.field("width"), "must be positive");
        cfg.dynamics.initial.bumps.push_back(bump);
      }
    }
    cfg.dynamics.dt = y.number("dt", 1e-3);
    cfg.dynamics.t_final = y.number("t_final", 1.0);
    cfg.dynamics.scheme = y.choice("scheme", "imex-bdf2", [](const std::string& s) { return dyn::scheme_from_string(s); });
    cfg.dynamics.shift = y.number("shift", 0.0);
    const auto th = y.child("threshold");
    th.allow({"a", "b"});
    cfg.dynamics.threshold_a = th.number("a", 1e6);
    cfg.dynamics.threshold_b = th.number("b", 0.0);
    cfg.dynamics.blowup_bound = y.number("blowup_bound", 1e8);
    cfg.dynamics.stability_bound = y.number("stability_bound", 1.0);
    const auto mon = y.child("monitor");
    mon.allow({"s", "p", "gamma"});
    cfg.dynamics.monitor_s = mon.integer("s", 0);
    cfg.dynamics.monitor_p = mon.number("p", 2.0);
    cfg.dynamics.monitor_gamma = mon.optional_number("gamma");
    check(cfg.dynamics.dt > 0.0, "dynamics.dt", "must be positive");
    check(cfg.dynamics.t_final > 0.0, "dynamics.t_final", "must be positive");
    check(cfg.dynamics.shift >= 0.0, "dynamics.shift", "must be non-negative");
    check(cfg.dynamics.threshold_a > 0.0, "dynamics.threshold.a", "must be positive");
    check(cfg.dynamics.monitor_s >= 0 && cfg.dynamics.monitor_s <= 2, "dynamics.monitor.s", "must be 0, 1 or 2");
    check(cfg.dynamics.monitor_p > 1.0, "dynamics.monitor.p", "must exceed 1");

    const auto o = top.child("output");
    o.allow({"directory", "snapshot_every", "norms"});
    cfg.output.directory = o.text("directory", "out");
    cfg.output.snapshot_every = o.number("snapshot_every", 0.0);
    check(cfg.output.snapshot_every >= 0.0, "output.snapshot_every", "must be non-negative");
    if (o.has("norms")) {
      const auto norms = o.raw("norms");
      check(norms.IsSequence(), "output.norms", "must be a list");
      for (std::size_t i = 0; i < norms.size(); ++i) {
        auto spec = parse_norm(norms[i], fmt::format("output.norms[{}]", i));
        check(spec.s >= 0 && spec.s <= 2, fmt::format("output.norms[{}].s", i), "must be 0, 1 or 2");
        check(spec.p > 1.0, fmt::format("output.norms[{}].p", i), "must exceed 1");
        cfg.output.norms.push_back(spec);
      }
    }

    const auto f = top.child("fit");
    f.allow({"x_lo", "x_hi", "lo_factor", "hi_fraction", "tolerance", "active_modes"});
    cfg.fit.x_lo = f.optional_number("x_lo");
    cfg.fit.x_hi = f.optional_number("x_hi");
    cfg.fit.lo_factor = f.number("lo_factor", 10.0);
    cfg.fit.hi_fraction = f.number("hi_fraction", 0.1);
    cfg.fit.tolerance = f.number("tolerance", 0.15);
    cfg.fit.active_modes = f.integers("active_modes", {0});
    check(cfg.fit.tolerance > 0.0, "fit.tolerance", "must be positive");
    for (int k : cfg.fit.active_modes) {
      check(k >= 0 && k <= cfg.discretization.k_max, "fit.active_modes", "modes must lie in 0..discretization.k_max");
    }

    if (top.has("mms")) {
      const auto m = top.child("mms");
      m.allow({"solution", "value", "mode", "exponents", "coefficients", "n_radial", "spatial_dt", "spatial_t_final",
               "dts", "temporal_n", "temporal_t_final"});
      MmsConfig mms;
      mms.solution = m.text("solution", "sphere-zonal");
      check(mms.solution == "sphere-zonal" || mms.solution == "constant" || mms.solution == "cone-power",
            "mms.solution", "expected sphere-zonal, constant or cone-power");
      mms.value = m.number("value", 1.0);
      mms.mode = m.integer("mode", 1);
      mms.exponents = m.numbers("exponents", {});
      mms.coefficients = m.numbers("coefficients", {});
      check(mms.exponents.size() == mms.coefficients.size(), "mms.coefficients",
            "must match the length of mms.exponents");
      check(mms.solution != "cone-power" || !mms.exponents.empty(), "mms.exponents",
            "cone-power needs at least one term");
      mms.n_radial = m.integers("n_radial", mms.n_radial);
      mms.spatial_dt = m.number("spatial_dt", mms.spatial_dt);
      mms.spatial_t_final = m.number("spatial_t_final", mms.spatial_t_final);
      mms.dts = m.numbers("dts", mms.dts);
      mms.temporal_n = m.integer("temporal_n", mms.temporal_n);
      mms.temporal_t_final = m.number("temporal_t_final", mms.temporal_t_final);
      cfg.mms = mms;
    }
    return cfg;
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read configuration file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path);
}

std::string serialize_config(const RunConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "topology" << YAML::Value << std::string(geometry::to_string(cfg.geometry.topology));
  out << YAML::Key << "outer_bc" << YAML::Value << std::string(geometry::to_string(cfg.geometry.outer_bc));
  out << YAML::Key << "north" << YAML::Value;
  emit_profile(out, cfg.geometry.north);
  if (cfg.geometry.south) {
    out << YAML::Key << "south" << YAML::Value;
    emit_profile(out, *cfg.geometry.south);
  }
  if (cfg.geometry.meridian_length) {
    out << YAML::Key << "meridian_length" << YAML::Value << num(*cfg.geometry.meridian_length);
  }
  out << YAML::EndMap;

  const auto& d = cfg.discretization;
  out << YAML::Key << "discretization" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_radial" << YAML::Value << d.n_radial;
  out << YAML::Key << "k_max" << YAML::Value << d.k_max;
  out << YAML::Key << "x_min" << YAML::Value << num(d.x_min);
  out << YAML::Key << "x_min_relative" << YAML::Value << d.x_min_relative;
  out << YAML::Key << "theta_points" << YAML::Value << d.theta_points;
  out << YAML::Key << "extension" << YAML::Value
      << std::string(d.extension == disc::Extension::chosen ? "chosen" : "minimal");
  out << YAML::EndMap;

  const auto& a = cfg.analysis;
  out << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << a.n;
  out << YAML::Key << "p" << YAML::Value << num(a.p);
  out << YAML::Key << "q" << YAML::Value << num(a.q);
  out << YAML::Key << "gamma" << YAML::Value << (a.gamma ? num(*a.gamma) : std::string("auto-max"));
  out << YAML::Key << "epsilon" << YAML::Value << num(a.epsilon);
  out << YAML::Key << "path" << YAML::Value
      << std::string(a.path == mellin::WeightPath::evolution ? "evolution" : "laplacian");
  if (!a.spectrum.empty()) {
    out << YAML::Key << "spectrum" << YAML::Value;
    emit_numbers(out, a.spectrum);
  }
  out << YAML::EndMap;

  const auto& y = cfg.dynamics;
  out << YAML::Key << "dynamics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "nonlinearity" << YAML::Value << YAML::BeginSeq;
  for (const auto& c : y.nonlinearity) {
    if (c.tabulated()) {
      out << YAML::Flow << YAML::BeginMap;
      out << YAML::Key << "times" << YAML::Value;
      emit_numbers(out, c.times);
      out << YAML::Key << "values" << YAML::Value;
      emit_numbers(out, c.values);
      out << YAML::Key << "lipschitz" << YAML::Value << num(c.lipschitz);
      out << YAML::EndMap;
    } else {
      out << num(c.constant);
    }
  }
  out << YAML::EndSeq;
  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "constant" << YAML::Value << num(y.initial.constant);
  out << YAML::Key << "bumps" << YAML::Value << YAML::BeginSeq;
  for (const auto& b : y.initial.bumps) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "mode" << YAML::Value << b.mode;
    out << YAML::Key << "amplitude" << YAML::Value << num(b.amplitude);
    out << YAML::Key << "center" << YAML::Value << num(b.center);
    out << YAML::Key << "width" << YAML::Value << num(b.width);
    out << YAML::Key << "phase" << YAML::Value << num(b.phase);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  out << YAML::Key << "dt" << YAML::Value << num(y.dt);
  out << YAML::Key << "t_final" << YAML::Value << num(y.t_final);
  out << YAML::Key << "scheme" << YAML::Value << std::string(dyn::to_string(y.scheme));
  out << YAML::Key << "shift" << YAML::Value << num(y.shift);
  out << YAML::Key << "threshold" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "a" << YAML::Value << num(y.threshold_a);
  out << YAML::Key << "b" << YAML::Value << num(y.threshold_b);
  out << YAML::EndMap;
  out << YAML::Key << "blowup_bound" << YAML::Value << num(y.blowup_bound);
  out << YAML::Key << "stability_bound" << YAML::Value << num(y.stability_bound);
  out << YAML::Key << "monitor" << YAML::Value << YAML::Flow << YAML::BeginMap;
  out << YAML::Key << "s" << YAML::Value << y.monitor_s;
  out << YAML::Key << "p" << YAML::Value << num(y.monitor_p);
  if (y.monitor_gamma) out << YAML::Key << "gamma" << YAML::Value << num(*y.monitor_gamma);
  out << YAML::EndMap;
  out << YAML::EndMap;

  const auto& o = cfg.output;
  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << YAML::DoubleQuoted << o.directory;
  out << YAML::Key << "snapshot_every" << YAML::Value << num(o.snapshot_every);
  out << YAML::Key << "norms" << YAML::Value << YAML::BeginSeq;
  for (const auto& n : o.norms) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << n.name;
    out << YAML::Key << "s" << YAML::Value << n.s;
    out << YAML::Key << "p" << YAML::Value << num(n.p);
    if (n.gamma) out << YAML::Key << "gamma" << YAML::Value << num(*n.gamma);
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;

  const auto& f = cfg.fit;
  out << YAML::Key << "fit" << YAML::Value << YAML::BeginMap;
  if (f.x_lo) out << YAML::Key << "x_lo" << YAML::Value << num(*f.x_lo);
  if (f.x_hi) out << YAML::Key << "x_hi" << YAML::Value << num(*f.x_hi);
  out << YAML::Key << "lo_factor" << YAML::Value << num(f.lo_factor);
  out << YAML::Key << "hi_fraction" << YAML::Value << num(f.hi_fraction);
  out << YAML::Key << "tolerance" << YAML::Value << num(f.tolerance);
  out << YAML::Key << "active_modes" << YAML::Value << YAML::Flow << f.active_modes;
  out << YAML::EndMap;

  if (cfg.mms) {
    const auto& m = *cfg.mms;
    out << YAML::Key << "mms" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "solution" << YAML::Value << m.solution;
    out << YAML::Key << "value" << YAML::Value << num(m.value);
    out << YAML::Key << "mode" << YAML::Value << m.mode;
    out << YAML::Key << "exponents" << YAML::Value;
    emit_numbers(out, m.exponents);
    out << YAML::Key << "coefficients" << YAML::Value;
    emit_numbers(out, m.coefficients);
    out << YAML::Key << "n_radial" << YAML::Value << YAML::Flow << m.n_radial;
    out << YAML::Key << "spatial_dt" << YAML::Value << num(m.spatial_dt);
    out << YAML::Key << "spatial_t_final" << YAML::Value << num(m.spatial_t_final);
    out << YAML::Key << "dts" << YAML::Value;
    emit_numbers(out, m.dts);
    out << YAML::Key << "temporal_n" << YAML::Value << m.temporal_n;
    out << YAML::Key << "temporal_t_final" << YAML::Value << num(m.temporal_t_final);
    out << YAML::EndMap;
  }

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(serialize_config(cfg)); }

} // namespace conelab::app
