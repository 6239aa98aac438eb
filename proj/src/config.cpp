#include "curveflow/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  }
  if (trim(text.substr(used)).size()) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string Config::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : to_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const double v = to_double(key, it->second);
  if (v != static_cast<int>(v)) throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<double> Config::get_list(const std::string& key, std::vector<double> fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  for (const auto& item : split(it->second, ',')) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
  return out;
}

std::vector<std::string> Config::get_words(const std::string& key,
                                           std::vector<std::string> fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : split(it->second, ',');
}

void Config::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{
      "scenario",       "speed",          "dimension",        "extent",
      "nodes",          "rho0",           "neck_a",           "neck_c",
      "neck_w",         "csv",            "L",                "ladder",
      "stabilization_tol", "sigma",       "dt_min",           "t_end",
      "snapshot_every", "epsilon_cutoff", "blend",            "admissibility_mode",
      "boost_step",     "boost_cap",      "smoothing_passes", "escape_gap",
      "companion_dt",   "radial_nodes",   "radial_radius",    "radial_dt_max",
      "front_cfl",      "du_max",         "monitors",         "monitor_M",
      "holder_M",       "monitor_tol",    "holder_tol",       "c2_cap",
      "out",            "seed",           "samples",          "write_snapshots"};
  return keys;
}

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::ball: return "ball";
    case ScenarioKind::dumbbell: return "dumbbell";
    case ScenarioKind::custom_csv: return "custom_csv";
  }
  return "unknown";
}

std::string to_string(AdmissibilityMode m) {
  switch (m) {
    case AdmissibilityMode::strict: return "strict";
    case AdmissibilityMode::auto_boost: return "auto_boost";
    case AdmissibilityMode::weak: return "weak";
  }
  return "unknown";
}

std::string to_string(CutoffBlend b) {
  return b == CutoffBlend::quadratic ? "quadratic" : "smooth_c2";
}

ScenarioConfig scenario_from_config(const Config& cfg) {
  cfg.reject_unknown(known_config_keys());
  ScenarioConfig sc;

  const std::string scenario = cfg.get("scenario", "ball");
  if (scenario == "ball") {
    sc.scenario = ScenarioKind::ball;
  } else if (scenario == "dumbbell") {
    sc.scenario = ScenarioKind::dumbbell;
  } else if (scenario == "custom_csv") {
    sc.scenario = ScenarioKind::custom_csv;
  } else {
    throw ConfigError("unknown scenario '" + scenario + "' (ball, dumbbell, custom_csv)");
  }

  sc.speed_text = cfg.get("speed", "H1");
  sc.dim = cfg.get_int("dimension", 2);
  if (sc.dim < 1 || sc.dim > kMaxGridDim) throw ConfigError("dimension must be 1, 2 or 3");

  sc.half_widths = cfg.get_list("extent", {2.0});
  std::vector<double> nodes = cfg.get_list("nodes", {257});
  sc.nodes.clear();
  for (double n : nodes) {
    if (n != static_cast<int>(n)) throw ConfigError("nodes must be integers");
    sc.nodes.push_back(static_cast<int>(n));
  }
  sc.rho0 = cfg.get_double("rho0", 1.0);
  sc.dumbbell.a = cfg.get_double("neck_a", sc.dumbbell.a);
  sc.dumbbell.c = cfg.get_double("neck_c", sc.dumbbell.c);
  sc.dumbbell.w = cfg.get_double("neck_w", sc.dumbbell.w);
  sc.csv_path = cfg.get("csv", "");
  if (sc.scenario == ScenarioKind::dumbbell) sc.dumbbell.validate();
  if (sc.scenario == ScenarioKind::custom_csv && sc.csv_path.empty()) {
    throw ConfigError("scenario custom_csv needs csv = <path>");
  }

  sc.L = cfg.get_double("L", 40.0);
  sc.ladder.L_values = cfg.get_list("ladder", {sc.L, 2.0 * sc.L, 4.0 * sc.L});
  sc.ladder.stabilization_tol = cfg.get_double("stabilization_tol", sc.ladder.stabilization_tol);
  sc.ladder.validate();

  StepperConfig& st = sc.stepper;
  st.sigma = cfg.get_double("sigma", st.sigma);
  st.dt_min = cfg.get_double("dt_min", st.dt_min);
  st.t_end = cfg.get_double("t_end", st.t_end);
  st.snapshot_every = cfg.get_double("snapshot_every", st.snapshot_every);
  st.epsilon_cutoff = cfg.get_double("epsilon_cutoff", st.epsilon_cutoff);
  const std::string blend = cfg.get("blend", "quadratic");
  if (blend == "quadratic") {
    st.blend = CutoffBlend::quadratic;
  } else if (blend == "smooth_c2") {
    st.blend = CutoffBlend::smooth_c2;
  } else {
    throw ConfigError("unknown blend '" + blend + "' (quadratic, smooth_c2)");
  }
  const std::string mode = cfg.get("admissibility_mode", "weak");
  if (mode == "strict") {
    st.admissibility_mode = AdmissibilityMode::strict;
  } else if (mode == "auto_boost") {
    st.admissibility_mode = AdmissibilityMode::auto_boost;
  } else if (mode == "weak") {
    st.admissibility_mode = AdmissibilityMode::weak;
  } else {
    throw ConfigError("unknown admissibility_mode '" + mode + "' (strict, auto_boost, weak)");
  }
  st.boost_step = cfg.get_double("boost_step", st.boost_step);
  st.boost_cap = cfg.get_int("boost_cap", st.boost_cap);
  st.smoothing_passes = cfg.get_int("smoothing_passes", st.smoothing_passes);
  st.escape_gap = cfg.get_double("escape_gap", st.escape_gap);
  st.companion_dt = cfg.get_double("companion_dt", st.companion_dt);
  st.validate();

  RadialOptions& ro = sc.radial;
  ro.nodes = cfg.get_int("radial_nodes", ro.nodes);
  ro.radius = cfg.get_double("radial_radius", sc.rho0);
  ro.dt_max = cfg.get_double("radial_dt_max", ro.dt_max);
  ro.front_cfl = cfg.get_double("front_cfl", ro.front_cfl);
  ro.du_max = cfg.get_double("du_max", ro.du_max);

  sc.monitors = cfg.get_words("monitors", {"gradient_bound", "speed_lower", "c2_bound",
                                           "f_ratio", "holder"});
  for (const auto& m : sc.monitors) {
    if (m != "gradient_bound" && m != "speed_lower" && m != "c2_bound" && m != "f_ratio" &&
        m != "holder") {
      throw ConfigError("unknown monitor '" + m + "'");
    }
  }
  // The monitors need M below the escape level L - gap.
  const double default_M = std::min(20.0, 0.5 * sc.L);
  sc.monitor_M = cfg.get_double("monitor_M", default_M);
  sc.holder_M = cfg.get_double("holder_M", default_M);
  sc.monitor_tol = cfg.get_double("monitor_tol", sc.monitor_tol);
  sc.holder_tol = cfg.get_double("holder_tol", sc.holder_tol);
  sc.c2_cap = cfg.get_double("c2_cap", sc.c2_cap);

  sc.out_dir = cfg.get("out", sc.out_dir);
  if (const char* env = std::getenv("CURVEFLOW_OUT"); env && *env) sc.out_dir = env;
  const double seed = cfg.get_double("seed", 7.0);
  if (seed < 0 || seed != static_cast<double>(static_cast<std::uint64_t>(seed))) {
    throw ConfigError("seed must be a non-negative integer");
  }
  sc.seed = static_cast<std::uint64_t>(seed);
  sc.samples = cfg.get_int("samples", sc.samples);
  if (sc.samples < 1) throw ConfigError("samples must be positive");
  sc.write_snapshots = to_bool("write_snapshots", cfg.get("write_snapshots", "true"));

  sc.speed();  // validates the grammar and the dimension
  return sc;
}

CurvatureFunctionSpec ScenarioConfig::speed() const { return parse_speed(speed_text, dim); }

Grid ScenarioConfig::grid() const {
  if (half_widths.size() == 1 && nodes.size() == 1) {
    return Grid::cube(dim, half_widths[0], nodes[0]);
  }
  std::vector<double> hw(dim, half_widths.back());
  std::vector<int> n(dim, nodes.back());
  if (half_widths.size() != 1 && static_cast<int>(half_widths.size()) != dim) {
    throw ConfigError("extent needs 1 or " + std::to_string(dim) + " values");
  }
  if (nodes.size() != 1 && static_cast<int>(nodes.size()) != dim) {
    throw ConfigError("nodes needs 1 or " + std::to_string(dim) + " values");
  }
  for (int a = 0; a < dim; ++a) {
    if (half_widths.size() == static_cast<std::size_t>(dim)) hw[a] = half_widths[a];
    if (nodes.size() == static_cast<std::size_t>(dim)) n[a] = nodes[a];
  }
  return Grid::box(dim, hw, n);
}

std::vector<double> ScenarioConfig::initial_data(const Grid& g) const {
  switch (scenario) {
    case ScenarioKind::ball: return sample_ball(g, rho0);
    case ScenarioKind::dumbbell: return sample_dumbbell(g, dumbbell);
    case ScenarioKind::custom_csv: return read_nodal_csv(g, csv_path);
  }
  throw ConfigError("unknown scenario");
}

void ScenarioConfig::check_speed_against_scenario() const {
  if (scenario == ScenarioKind::custom_csv) return;
  const CurvatureFunctionSpec spec = speed();
  CurvatureVector cyl = CurvatureVector::Ones(dim);
  cyl[dim - 1] = 0.0;
  if (dim == 1 || !cone_contains(cyl, spec.cone, spec.cone_floor)) {
    throw ConfigError("speed " + spec.name() + " is not usable with the " + to_string(scenario) +
                      " scenario: its data are cylinder-like near the boundary, with curvature "
                      "vector (1, ..., 1, 0) on the boundary of the cone " +
                      "Gamma_" + std::to_string(spec.cone.k) + ", where the speed vanishes");
  }
}

}  // namespace curveflow
