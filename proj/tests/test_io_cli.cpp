#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "curveflow/cli.hpp"
#include "curveflow/config.hpp"
#include "curveflow/errors.hpp"
#include "curveflow/io.hpp"

using namespace curveflow;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("curveflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json load_json(const fs::path& p) { return Json::parse(slurp(p)); }

std::vector<std::string> small_run(const fs::path& out) {
  return {"run", "-o", out.string(), "-s", "nodes=33", "-s", "L=10", "-s", "t_end=0.2",
          "-s", "snapshot_every=0.1", "-s", "monitors=gradient_bound,c2_bound", "-s", "monitor_M=5"};
}

}  // namespace

TEST_CASE("config text parsing") {
  Config c = Config::parse("# comment\nspeed = H1  # trailing\n\nL = 25\nladder = 10, 20 ,40\n");
  CHECK(c.get("speed", "") == "H1");
  CHECK(c.get_double("L", 0) == 25.0);
  CHECK(c.get_list("ladder", {}) == std::vector<double>{10, 20, 40});
  CHECK(c.get_int("nodes", 65) == 65);
  c.set_override("L=30");
  CHECK(c.get_double("L", 0) == 30.0);
  CHECK_THROWS_AS(c.set_override("novalue"), ConfigError);
  CHECK_THROWS_AS(Config::parse("just words\n"), ConfigError);
  Config bad = Config::parse("L = abc\n");
  CHECK_THROWS_AS(bad.get_double("L", 0), ConfigError);
}

TEST_CASE("scenario resolution") {
  unsetenv("CURVEFLOW_OUT");
  Config c = Config::parse("scenario = dumbbell\nextent = 2.5, 1.5\nnodes = 101, 61\nL = 40\n");
  const ScenarioConfig sc = scenario_from_config(c);
  CHECK(sc.scenario == ScenarioKind::dumbbell);
  const Grid g = sc.grid();
  CHECK(g.n(0) == 101);
  CHECK(g.n(1) == 61);
  CHECK(sc.ladder.L_values == std::vector<double>{40, 80, 160});
  CHECK(sc.monitor_M == 20.0);

  CHECK_THROWS_AS(scenario_from_config(Config::parse("bogus_key = 1\n")), ConfigError);
  CHECK_THROWS_AS(scenario_from_config(Config::parse("scenario = torus\n")), ConfigError);
  const ScenarioConfig gauss = scenario_from_config(Config::parse("speed = Gauss\n"));
  CHECK_THROWS_AS(gauss.check_speed_against_scenario(), ConfigError);

  setenv("CURVEFLOW_OUT", "/tmp/elsewhere", 1);
  CHECK(scenario_from_config(Config::parse("out = here\n")).out_dir == "/tmp/elsewhere");
  unsetenv("CURVEFLOW_OUT");
}

TEST_CASE("json numbers and sha256") {
  CHECK(json_number(1.5).is_number());
  CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(json_number(std::nan("")) == "nan");
  const fs::path dir = scratch("sha");
  fs::create_directories(dir);
  std::ofstream(dir / "abc") << "abc";
  CHECK(sha256_file(dir / "abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("snapshot csv round trip") {
  const Grid g = Grid::cube(2, 1.0, 5);
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = 0.1 * i + 1.0 / 3.0;
  const fs::path dir = scratch("csv");
  OutputDir out(dir);
  out.write_text("s.csv", snapshot_csv(g, u, 0.25, 40.0));
  const SnapshotFile f = read_snapshot_csv(dir / "s.csv");
  CHECK(f.t == 0.25);
  CHECK(f.L == 40.0);
  CHECK(f.h == g.h());
  CHECK(f.u == u);
  CHECK(f.coords[7][0] == g.coords(7)[0]);
  out.write_manifest(Json{{"note", "x"}});
  const Json m = load_json(dir / "manifest.json");
  CHECK(m["files"][0]["path"] == "s.csv");
  CHECK(m["files"][0]["sha256"] == sha256_file(dir / "s.csv"));
  CHECK(snapshot_name("snapshot", 7) == "snapshot_0007.csv");
  CHECK(grid_from_json(grid_json(g)).same_layout(g));
}

TEST_CASE("cli exit codes") {
  unsetenv("CURVEFLOW_OUT");
  const fs::path props = scratch("props");
  CHECK(run_cli({"properties", "--speed", "H1", "--samples", "500", "--seed", "7", "-o", props.string()}) == kExitOk);
  CHECK(fs::exists(props / "properties.json"));
  CHECK(fs::exists(props / "manifest.json"));

  CHECK(run_cli({"run", "--speed", "Gauss", "-o", scratch("gauss").string()}) == kExitConfig);
  CHECK(run_cli({"run", "-s", "extent=0.9", "-s", "nodes=37", "-o", scratch("shell").string()}) == kExitConfig);
  CHECK(run_cli({"run", "-s", "unknown_key=3"}) == kExitConfig);
  CHECK(run_cli({"nonsense"}) == kExitConfig);
  CHECK(run_cli({"run", "-s", "nodes=129", "-s", "L=40", "-s", "admissibility_mode=strict",
                 "-s", "t_end=0.01", "-o", scratch("strict").string()}) == kExitNumerical);
}

TEST_CASE("cli run is deterministic and monitors replay bit-identically") {
  unsetenv("CURVEFLOW_OUT");
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  const int ca = run_cli(small_run(a));
  CHECK((ca == kExitOk || ca == kExitCheckFailed));
  CHECK(run_cli(small_run(b)) == ca);
  const Json m = load_json(a / "manifest.json");
  REQUIRE(m["files"].size() >= 3);
  for (const auto& f : m["files"]) {
    const std::string name = f["path"];
    CHECK(sha256_file(a / name) == f["sha256"].get<std::string>());
    CHECK(sha256_file(b / name) == f["sha256"].get<std::string>());
  }
  const std::string before = slurp(a / "monitors.json");
  const int cm = run_cli({"monitors", a.string()});
  CHECK(cm == ca);
  CHECK(slurp(a / "replay" / "monitors.json") == before);
  CHECK(fs::exists(a / "snapshot_0000.csv"));
  CHECK(load_json(a / "manifest.json")["command"] == "run");

  CHECK(run_cli({"report", (a / "monitors.json").string()}) == ca);
}

TEST_CASE("cli radial and ladder") {
  unsetenv("CURVEFLOW_OUT");
  const fs::path r = scratch("radial");
  CHECK(run_cli({"radial", "-s", "radial_nodes=257", "-s", "L=10", "-o", r.string()}) == kExitOk);
  const Json u = load_json(r / "u_min.json");
  CHECK(u["stop_reason"] == "escaped");
  const fs::path l = scratch("ladder");
  const int code = run_cli({"ladder", "-s", "nodes=33", "-s", "ladder=8,16", "-s", "t_end=0.2",
                            "-s", "snapshot_every=0.1", "-o", l.string()});
  CHECK((code == kExitOk || code == kExitCheckFailed));
  const Json rep = load_json(l / "ladder_report.json");
  REQUIRE(rep.size() == 2);
  CHECK(rep[0]["compared_with_L"] == 16.0);
}
