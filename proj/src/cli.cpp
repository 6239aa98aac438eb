#include "curveflow/cli.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "curveflow/config.hpp"
#include "curveflow/errors.hpp"
#include "curveflow/graph_geometry.hpp"
#include "curveflow/io.hpp"
#include "curveflow/ladder.hpp"
#include "curveflow/monitors.hpp"
#include "curveflow/radial_oracle.hpp"

namespace curveflow {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out;
  std::string speed;
  int samples = 0;
  long long seed = -1;
  int dim = 0;
  int threads = 1;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("-c,--config", a.config_file, "flat key = value config file");
  sub->add_option("-s,--set", a.overrides, "override a config key (key=value)");
  sub->add_option("-o,--out", a.out, "output directory");
  sub->add_option("--speed", a.speed, "speed: H1 | Hk^1/k:k=N | quotient:k=N,l=M | Gauss");
  sub->add_option("--dim", a.dim, "dimension");
  sub->add_option("--seed", a.seed, "seed");
  sub->add_option("--samples", a.samples, "property-suite samples");
  sub->add_option("--threads", a.threads, "worker cap (ladder runs)")->check(CLI::PositiveNumber);
}

Config load_config(const CommonArgs& a) {
  Config cfg = a.config_file.empty() ? Config{} : Config::load(a.config_file);
  for (const auto& o : a.overrides) cfg.set_override(o);
  if (!a.out.empty()) cfg.set("out", a.out);
  if (!a.speed.empty()) cfg.set("speed", a.speed);
  if (a.dim > 0) cfg.set("dimension", std::to_string(a.dim));
  if (a.seed >= 0) cfg.set("seed", std::to_string(a.seed));
  if (a.samples > 0) cfg.set("samples", std::to_string(a.samples));
  return cfg;
}

Json config_echo(const Config& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : cfg.values()) j[k] = v;
  return j;
}

Json optional_time(const std::optional<double>& t) { return t ? Json(*t) : Json(nullptr); }

Json admissibility_json(const AdmissibilityReport& rep) {
  return {{"status", to_string(rep.status)},
          {"checked_nodes", rep.checked_nodes},
          {"violations", rep.violations.size()},
          {"interface_violations", rep.interface_violations},
          {"min_f", rep.min_f}};
}

std::vector<MonitorReport> evaluate_monitors(const ScenarioConfig& sc, const RunResult& run,
                                             const CurvatureFunctionSpec& spec) {
  std::vector<MonitorReport> out;
  for (const auto& name : sc.monitors) {
    if (name == "gradient_bound") {
      out.push_back(monitor_gradient_bound(run, sc.monitor_M, sc.monitor_tol));
    } else if (name == "speed_lower") {
      out.push_back(monitor_speed_lower(run, sc.monitor_M, spec, sc.monitor_tol));
    } else if (name == "c2_bound") {
      out.push_back(monitor_c2_bound(run, sc.monitor_M, sc.c2_cap));
    } else if (name == "f_ratio") {
      out.push_back(monitor_f_ratio(run, spec, sc.monitor_tol));
    } else if (name == "holder") {
      out.push_back(monitor_holder(run, sc.holder_M, sc.holder_tol));
    }
  }
  return out;
}

bool print_monitors(const std::vector<MonitorReport>& reports) {
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("  monitor %-15s %s  worst=%.6g tol=%.3g%s\n", r.name.c_str(),
                r.passed ? "pass" : "FAIL", r.worst_violation, r.tolerance,
                r.vacuous ? " (vacuous)" : "");
    ok = ok && r.passed;
  }
  return ok;
}

Json run_summary(const RunResult& r) {
  return {{"stop_reason", to_string(r.stop_reason)},
          {"escape_time", optional_time(r.escape_time)},
          {"steps", r.steps},
          {"min_dt", r.min_dt},
          {"worst_descent", r.worst_descent},
          {"pinned_node_steps", r.pinned_node_steps},
          {"stiffness_message", r.stiffness_message}};
}

// Writes every snapshot of `r`; returns the manifest entries.
Json write_snapshots(OutputDir& out, const RunResult& r, const std::string& stem) {
  Json list = Json::array();
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const Snapshot& s = r.snapshots[k];
    const std::string name = snapshot_name(stem, k);
    out.write_text(name, snapshot_csv(r.grid, s.u, s.t, r.L));
    list.push_back({{"file", name}, {"t", s.t}, {"companion", s.companion}});
  }
  return list;
}

struct Prepared {
  ScenarioConfig sc;
  CurvatureFunctionSpec spec;
  Grid grid;
  std::vector<double> u0;
};

Prepared prepare(const Config& cfg) {
  ScenarioConfig sc = scenario_from_config(cfg);
  sc.check_speed_against_scenario();
  CurvatureFunctionSpec spec = sc.speed();
  Grid grid = sc.grid();
  std::vector<double> u0 = sc.initial_data(grid);
  return {std::move(sc), std::move(spec), std::move(grid), std::move(u0)};
}

Json base_manifest(const std::string& command, const Config& cfg, const Prepared& p) {
  Json m;
  m["command"] = command;
  m["config"] = config_echo(cfg);
  m["scenario"] = to_string(p.sc.scenario);
  m["speed"] = p.spec.name();
  m["grid"] = grid_json(p.grid);
  m["stepper"] = {{"sigma", p.sc.stepper.sigma},
                  {"dt_min", p.sc.stepper.dt_min},
                  {"t_end", p.sc.stepper.t_end},
                  {"snapshot_every", p.sc.stepper.snapshot_every},
                  {"epsilon_cutoff", p.sc.stepper.epsilon_cutoff},
                  {"blend", to_string(p.sc.stepper.blend)},
                  {"admissibility_mode", to_string(p.sc.stepper.admissibility_mode)},
                  {"smoothing_passes", p.sc.stepper.smoothing_passes},
                  {"escape_gap", p.sc.stepper.escape_gap},
                  {"companion_dt", p.sc.stepper.companion_dt}};
  return m;
}

int cmd_run(const Config& cfg) {
  Prepared p = prepare(cfg);
  const ScenarioConfig& sc = p.sc;
  FieldState state = initialize(p.grid, p.u0, sc.L, sc.stepper, p.spec);
  const AdmissibilityReport initial = admissibility_check(p.spec, state);
  RunResult result = run(std::move(state), p.spec, sc.stepper);
  const std::vector<MonitorReport> reports = evaluate_monitors(sc, result, p.spec);

  std::printf("run %s L=%g: %s", p.spec.name().c_str(), sc.L,
              to_string(result.stop_reason).c_str());
  if (result.escape_time) std::printf(" at t=%.6g", *result.escape_time);
  std::printf(" after %zu steps\n", result.steps);
  const bool ok = print_monitors(reports);

  OutputDir out(sc.out_dir);
  Json m = base_manifest("run", cfg, p);
  m["L"] = sc.L;
  m["cap_margin"] = result.cap_margin;
  m["initial_admissibility"] = admissibility_json(initial);
  m.update(run_summary(result));
  if (sc.write_snapshots) m["snapshots"] = write_snapshots(out, result, "snapshot");
  Json bundle = Json::array();
  Json summary = Json::array();
  for (const auto& r : reports) {
    bundle.push_back(to_json(r));
    summary.push_back({{"monitor", r.name}, {"passed", r.passed},
                       {"worst_violation", json_number(r.worst_violation)},
                       {"tolerance", r.tolerance}});
  }
  if (!reports.empty()) out.write_json("monitors.json", bundle);
  m["monitor_summary"] = summary;
  out.write_manifest(m);
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_ladder(const Config& cfg, int threads) {
  Prepared p = prepare(cfg);
  const ScenarioConfig& sc = p.sc;
  LadderResult lr = ladder_run(p.grid, p.u0, sc.ladder, p.spec, sc.stepper, threads);

  OutputDir out(sc.out_dir);
  Json m = base_manifest("ladder", cfg, p);
  Json runs = Json::array();
  for (const RunResult& r : lr.runs) {
    std::printf("ladder L=%g: %s", r.L, to_string(r.stop_reason).c_str());
    if (r.escape_time) std::printf(" at t=%.6g", *r.escape_time);
    std::printf("\n");
    Json e = run_summary(r);
    e["L"] = r.L;
    Json timeline = Json::array();
    for (const ComponentRecord& c : component_timeline(r)) {
      timeline.push_back({{"t", c.t}, {"count", c.count}, {"volumes", c.volumes}});
    }
    e["components"] = timeline;
    runs.push_back(std::move(e));
  }
  for (const StabilizationRow& row : lr.table) {
    std::printf("  L=%g vs %g: max diff %.6g (threshold %.3g) %s\n", row.L_low, row.L_high,
                row.max_diff, row.threshold, row.stabilized ? "stabilized" : "not stabilized");
  }
  out.write_json("ladder_report.json", ladder_report(lr));

  const RunResult& last = lr.runs.back();
  if (sc.write_snapshots) {
    m["snapshots"] = write_snapshots(out, last, "snapshot");
    Json slices = Json::array();
    for (std::size_t k : last.regular_snapshots()) {
      const DomainSlice slice = extract_domain(last.state_at(k), last.escape_gap);
      const std::string name = snapshot_name("domain", k);
      out.write_text(name, domain_csv(last.grid, slice));
      slices.push_back({{"file", name}, {"t", slice.t}, {"components", slice.component_count()}});
    }
    m["domain_slices"] = slices;
  }
  m["runs"] = runs;
  out.write_manifest(m);
  return kExitOk;
}

int cmd_radial(const Config& cfg) {
  ScenarioConfig sc = scenario_from_config(cfg);
  if (sc.scenario != ScenarioKind::ball) {
    throw ConfigError("the radial oracle only covers the ball scenario");
  }
  sc.check_speed_against_scenario();
  const CurvatureFunctionSpec spec = sc.speed();
  const double rho = sc.rho0;
  RadialRunResult rr = radial_run([rho](double r) { return ball_radial_profile(r, rho); }, sc.L,
                                  spec, sc.stepper, sc.radial);
  const double T = cylinder_extinction_time(sc.rho0, spec);
  std::printf("radial %s d=%d L=%g: %s", spec.name().c_str(), sc.dim, sc.L,
              to_string(rr.stop_reason).c_str());
  if (rr.escape_time) std::printf(" at t=%.6g", *rr.escape_time);
  std::printf(" (cylinder extinction %.6g)\n", T);

  OutputDir out(sc.out_dir);
  Json m;
  m["command"] = "radial";
  m["config"] = config_echo(cfg);
  m["speed"] = spec.name();
  m["dim"] = sc.dim;
  m["nodes"] = sc.radial.nodes;
  m["L"] = sc.L;
  m["cylinder_extinction_time"] = T;
  m["stop_reason"] = to_string(rr.stop_reason);
  m["escape_time"] = optional_time(rr.escape_time);
  m["steps"] = rr.steps;
  m["worst_descent"] = rr.worst_descent;
  if (sc.write_snapshots) {
    Json list = Json::array();
    for (std::size_t k = 0; k < rr.snapshots.size(); ++k) {
      const std::string name = snapshot_name("radial", k);
      out.write_text(name, radial_csv(rr.dr, rr.snapshots[k].u, rr.snapshots[k].t, rr.L));
      list.push_back({{"file", name}, {"t", rr.snapshots[k].t}});
    }
    m["snapshots"] = list;
  }
  out.write_json("u_min.json", u_min_series(rr));
  out.write_manifest(m);
  return kExitOk;
}

int cmd_properties(const Config& cfg, const std::vector<int>& dims) {
  ScenarioConfig sc = scenario_from_config(cfg);
  std::vector<int> ds = dims.empty() ? std::vector<int>{sc.dim} : dims;
  bool ok = true;
  Json reports = Json::array();
  for (int d : ds) {
    const CurvatureFunctionSpec spec = parse_speed(sc.speed_text, d);
    const PropertyReport rep = verify_structure_conditions(spec, sc.samples, sc.seed);
    std::printf("properties %s d=%d samples=%d seed=%llu: %s\n", rep.speed.c_str(), d,
                rep.samples, static_cast<unsigned long long>(rep.seed),
                rep.passed() ? "pass" : "FAIL");
    Json conds = Json::array();
    for (const auto& c : rep.conditions) {
      std::printf("  %-14s %s  worst=%.6g tol=%.3g\n", c.name.c_str(), c.passed ? "pass" : "FAIL",
                  c.worst, c.tolerance);
      conds.push_back({{"condition", c.name}, {"worst", c.worst}, {"tolerance", c.tolerance},
                       {"passed", c.passed}});
    }
    reports.push_back({{"speed", rep.speed}, {"dim", d}, {"samples", rep.samples},
                       {"seed", rep.seed}, {"conditions", conds}, {"passed", rep.passed()}});
    ok = ok && rep.passed();
  }
  OutputDir out(sc.out_dir);
  out.write_json("properties.json", reports);
  out.write_manifest({{"command", "properties"}, {"config", config_echo(cfg)}, {"passed", ok}});
  return ok ? kExitOk : kExitCheckFailed;
}

Json load_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ConfigError("no manifest.json in " + dir.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest in " + dir.string() + ": " + e.what());
  }
}

// Rebuilds a RunResult from a directory written by `run` or `ladder`.
RunResult load_run(const fs::path& dir) {
  Json m = load_manifest(dir);
  if (!m.contains("snapshots") || !m.contains("grid")) {
    throw ConfigError(dir.string() + " holds no grid snapshots");
  }
  RunResult r;
  r.grid = grid_from_json(m["grid"]);
  r.speed = m.value("speed", "H1");
  r.escape_gap = m["stepper"].value("escape_gap", 2.0);
  double L = m.value("L", 0.0);
  for (const auto& e : m["snapshots"]) {
    const SnapshotFile f = read_snapshot_csv(dir / e.at("file").get<std::string>());
    if (f.u.size() != r.grid.size()) throw ConfigError("snapshot size does not match the grid");
    L = f.L;
    r.snapshots.push_back({f.t, f.u, e.value("companion", false)});
  }
  r.L = L;
  const double eps_frac = m["stepper"].value("epsilon_cutoff", 0.05);
  StepperConfig probe;
  probe.epsilon_cutoff = eps_frac;
  r.cap_margin = cutoff_width(probe, L) / 4.0;
  if (m.contains("escape_time") && m["escape_time"].is_number()) {
    r.escape_time = m["escape_time"].get<double>();
  }
  return r;
}

int cmd_monitors(const Config& cfg, const std::string& run_dir) {
  RunResult r = load_run(run_dir);
  Config merged = cfg;
  // settings of the stored run apply unless overridden here
  const Json stored = load_manifest(run_dir).value("config", Json::object());
  for (const auto& [k, v] : stored.items()) {
    if (k != "out" && v.is_string() && !merged.has(k)) merged.set(k, v.get<std::string>());
  }
  if (!merged.has("out")) merged.set("out", (fs::path(run_dir) / "replay").string());
  if (!merged.has("speed")) merged.set("speed", r.speed);
  if (!merged.has("dimension")) merged.set("dimension", std::to_string(r.grid.dim()));
  if (!merged.has("L")) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", r.L);
    merged.set("L", buf);
  }
  ScenarioConfig sc = scenario_from_config(merged);
  const CurvatureFunctionSpec spec = sc.speed();
  const std::vector<MonitorReport> reports = evaluate_monitors(sc, r, spec);
  std::printf("monitors on %s (%zu snapshots)\n", run_dir.c_str(), r.snapshots.size());
  const bool ok = print_monitors(reports);
  OutputDir out(sc.out_dir);
  Json bundle = Json::array();
  for (const auto& rep : reports) bundle.push_back(to_json(rep));
  out.write_json("monitors.json", bundle);
  out.write_manifest({{"command", "monitors"}, {"config", config_echo(merged)},
                      {"source", run_dir}, {"passed", ok}});
  return ok ? kExitOk : kExitCheckFailed;
}

// One summary row per check found in a JSON document.
void collect_rows(const Json& j, const std::string& file,
                  std::vector<std::array<std::string, 4>>& rows, bool& ok) {
  auto add = [&](const std::string& item, bool passed, const std::string& detail) {
    rows.push_back({file, item, passed ? "pass" : "FAIL", detail});
    ok = ok && passed;
  };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  if (j.is_array()) {
    for (const auto& e : j) collect_rows(e, file, rows, ok);
    return;
  }
  if (!j.is_object()) return;
  if (j.contains("monitor")) {
    const Json& w = j["worst_violation"];
    add(j["monitor"].get<std::string>(), j.value("passed", false),
        "worst=" + (w.is_number() ? fmt(w.get<double>()) : w.get<std::string>()));
  } else if (j.contains("stabilization_max_diff") && j.contains("stabilized")) {
    double worst = 0.0;
    for (const auto& p : j["stabilization_max_diff"]) worst = std::max(worst, p[1].get<double>());
    add("ladder L=" + fmt(j["L"].get<double>()), j["stabilized"].get<bool>(),
        "max_diff=" + fmt(worst));
  } else if (j.contains("conditions")) {
    for (const auto& c : j["conditions"]) {
      add(j["speed"].get<std::string>() + " d=" + std::to_string(j["dim"].get<int>()) + " " +
              c["condition"].get<std::string>(),
          c["passed"].get<bool>(), "worst=" + fmt(c["worst"].get<double>()));
    }
  } else if (j.contains("command")) {
    std::string detail = j.value("stop_reason", std::string{});
    if (j.contains("escape_time") && j["escape_time"].is_number()) {
      detail += " t=" + fmt(j["escape_time"].get<double>());
    }
    rows.push_back({file, j["command"].get<std::string>(), "-", detail});
    if (j.contains("monitor_summary")) collect_rows(j["monitor_summary"], file, rows, ok);
  }
}

int cmd_report(const std::vector<std::string>& files) {
  std::vector<std::array<std::string, 4>> rows;
  bool ok = true;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw ConfigError("cannot open " + f);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("malformed JSON in " + f + ": " + e.what());
    }
    collect_rows(j, f, rows, ok);
  }
  std::size_t w[3] = {4, 5, 6};
  for (const auto& r : rows) {
    for (int c = 0; c < 3; ++c) w[c] = std::max(w[c], r[c].size());
  }
  std::printf("%-*s  %-*s  %-*s  %s\n", static_cast<int>(w[0]), "file", static_cast<int>(w[1]),
              "check", static_cast<int>(w[2]), "result", "detail");
  for (const auto& r : rows) {
    std::printf("%-*s  %-*s  %-*s  %s\n", static_cast<int>(w[0]), r[0].c_str(),
                static_cast<int>(w[1]), r[1].c_str(), static_cast<int>(w[2]), r[2].c_str(),
                r[3].c_str());
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"curvature flow of graphs: runs, ladders and checks", "curveflow"};
  app.require_subcommand(1);
  CommonArgs common;
  std::vector<int> dims;
  std::string run_dir;
  std::vector<std::string> report_files;

  CLI::App* run_cmd = app.add_subcommand("run", "single ceiling L");
  CLI::App* ladder_cmd = app.add_subcommand("ladder", "ceilings L_1 < L_2 < ... and stabilization");
  CLI::App* radial_cmd = app.add_subcommand("radial", "rotationally symmetric reference run");
  CLI::App* prop_cmd = app.add_subcommand("properties", "structure conditions of a speed");
  CLI::App* mon_cmd = app.add_subcommand("monitors", "re-evaluate monitors on a stored run");
  CLI::App* report_cmd = app.add_subcommand("report", "summary table of JSON outputs");
  for (CLI::App* sub : {run_cmd, ladder_cmd, radial_cmd, prop_cmd, mon_cmd}) {
    add_common(sub, common);
  }
  prop_cmd->add_option("--dims", dims, "dimensions to check (default: the config dimension)");
  mon_cmd->add_option("run_dir", run_dir, "directory written by run or ladder")->required();
  report_cmd->add_option("files", report_files, "JSON files")->required();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*report_cmd) return cmd_report(report_files);
    const Config cfg = load_config(common);
    if (*run_cmd) return cmd_run(cfg);
    if (*ladder_cmd) return cmd_ladder(cfg, common.threads);
    if (*radial_cmd) return cmd_radial(cfg);
    if (*prop_cmd) return cmd_properties(cfg, dims);
    if (*mon_cmd) return cmd_monitors(cfg, run_dir);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const ConditionViolation& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return kExitCheckFailed;
  } catch (const AdmissibilityError& e) {
    std::fprintf(stderr, "numerical fault: %s\n", e.what());
    return kExitNumerical;
  } catch (const NumericalFault& e) {
    std::fprintf(stderr, "numerical fault: %s\n", e.what());
    return kExitNumerical;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical fault: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace curveflow
