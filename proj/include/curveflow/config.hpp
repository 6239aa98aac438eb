#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "curveflow/curvature_functions.hpp"
#include "curveflow/flow_solver.hpp"
#include "curveflow/grid.hpp"
#include "curveflow/ladder.hpp"
#include "curveflow/radial_oracle.hpp"
#include "curveflow/scenarios.hpp"

namespace curveflow {

/// Flat `key = value` settings. '#' starts a comment; blank lines are ignored.
/// Later assignments (file, then overrides) replace earlier ones.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<text>");
  static Config load(const std::string& path);

  /// Accepts "key=value".
  void set_override(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::string> get_words(const std::string& key,
                                     std::vector<std::string> fallback) const;

  /// Throws ConfigError naming the first key outside `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

enum class ScenarioKind { ball, dumbbell, custom_csv };

/// Everything a run needs, resolved from a Config.
struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::ball;
  std::string speed_text = "H1";
  int dim = 2;
  std::vector<double> half_widths{2.0};
  std::vector<int> nodes{257};
  double rho0 = 1.0;
  Dumbbell dumbbell;
  std::string csv_path;
  double L = 40.0;
  LadderConfig ladder;
  StepperConfig stepper;
  RadialOptions radial;
  std::vector<std::string> monitors;
  double monitor_M = 20.0;
  double holder_M = 20.0;
  double monitor_tol = 1e-2;
  double holder_tol = 5e-2;
  double c2_cap = 10.0;
  std::string out_dir = "curveflow_out";
  std::uint64_t seed = 7;
  int samples = 10000;
  bool write_snapshots = true;

  CurvatureFunctionSpec speed() const;
  Grid grid() const;
  std::vector<double> initial_data(const Grid& g) const;
  /// Rejects speeds whose cylinder curvature vector (1, ..., 1, 0) is not strictly inside
  /// the cone: the ball and dumbbell data are cylinder-asymptotic near the boundary.
  void check_speed_against_scenario() const;
};

/// Keys understood by scenario_from_config.
const std::set<std::string>& known_config_keys();

/// Resolves and validates a config. Throws ConfigError on unknown keys or bad values.
/// CURVEFLOW_OUT, when set, replaces the output directory.
ScenarioConfig scenario_from_config(const Config& cfg);

std::string to_string(ScenarioKind k);
std::string to_string(AdmissibilityMode m);
std::string to_string(CutoffBlend b);

}  // namespace curveflow
