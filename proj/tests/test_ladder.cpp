#include "doctest.h"

#include <cmath>

#include "curveflow/errors.hpp"
#include "curveflow/ladder.hpp"
#include "curveflow/scenarios.hpp"

using namespace curveflow;

namespace {

FieldState field(const Grid& g, double L, auto fn) {
  FieldState s;
  s.grid = g;
  s.L = L;
  s.u.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coords(i);
    s.u[i] = fn(x[0], x[1]);
  }
  return s;
}

StepperConfig weak_cfg() {
  StepperConfig cfg;
  cfg.admissibility_mode = AdmissibilityMode::weak;
  return cfg;
}

}  // namespace

TEST_CASE("half-space gives a two-cell boundary slab") {
  const Grid g = Grid::cube(2, 1.0, 21);
  const auto s = field(g, 10.0, [](double x, double) { return x < 0.02 ? 0.0 : 10.0; });
  const DomainSlice d = extract_domain(s);
  CHECK(d.component_count() == 1);
  for (int i = 0; i < 21; ++i) {
    for (int j = 0; j < 21; ++j) {
      const std::size_t idx = g.linear_index({i, j, 0});
      CHECK(d.inside[idx] == (i <= 10 ? 1 : 0));
      CHECK(d.boundary[idx] == ((i == 10 || i == 11) ? 1 : 0));
    }
  }
  CHECK(d.component_sizes[0] == 11u * 21u);
}

TEST_CASE("components are ordered by size") {
  const Grid g = Grid::cube(2, 1.0, 41);
  const auto s = field(g, 10.0, [](double x, double y) {
    if (std::hypot(x - 0.5, y) < 0.3) return 1.0;
    if (std::hypot(x + 0.5, y) < 0.2) return 1.0;
    return 10.0;
  });
  const DomainSlice d = extract_domain(s);
  REQUIRE(d.component_count() == 2);
  CHECK(d.component_sizes[0] > d.component_sizes[1]);
  CHECK(d.labels[g.linear_index({30, 20, 0})] == 0);
  CHECK(d.labels[g.linear_index({10, 20, 0})] == 1);
  CHECK(d.labels[g.linear_index({20, 20, 0})] == -1);
}

TEST_CASE("empty region after escape") {
  const Grid g = Grid::cube(2, 1.0, 11);
  const auto s = field(g, 10.0, [](double, double) { return 9.0; });
  const DomainSlice d = extract_domain(s);
  CHECK(d.component_count() == 0);
  for (auto b : d.boundary) CHECK(b == 0);
}

TEST_CASE("initial ball and dumbbell domains") {
  const Grid g = Grid::cube(2, 2.0, 81);
  StepperConfig cfg = weak_cfg();
  const auto spec = CurvatureFunctionSpec::mean(2);
  const FieldState ball = initialize(g, sample_ball(g, 1.0), 20.0, cfg, spec);
  const DomainSlice d = extract_domain(ball);
  CHECK(d.component_count() == 1);
  // u0 < 18 roughly on |x| < 1 - 1/17
  const double area = d.component_sizes[0] * g.h() * g.h();
  const double r = 1.0 - 1.0 / 17.0;
  CHECK(area == doctest::Approx(M_PI * r * r).epsilon(0.05));

  const double hw[2] = {2.5, 1.5};
  const int n[2] = {101, 61};
  const Grid gb = Grid::box(2, hw, n);
  const FieldState db = initialize(gb, sample_dumbbell(gb, Dumbbell{}), 40.0, cfg, spec);
  CHECK(extract_domain(db).component_count() == 1);
}

TEST_CASE("component timeline of a ball run") {
  const Grid g = Grid::cube(2, 2.0, 33);
  StepperConfig cfg = weak_cfg();
  cfg.t_end = 2.0;
  cfg.snapshot_every = 0.1;
  const auto spec = CurvatureFunctionSpec::mean(2);
  const RunResult r = solve_dirichlet(g, sample_ball(g, 1.0), 10.0, spec, cfg);
  const auto tl = component_timeline(r);
  REQUIRE(tl.size() == r.snapshots.size());
  CHECK(tl.front().count == 1);
  CHECK(tl.back().count == 0);
  for (std::size_t k = 1; k < tl.size(); ++k) CHECK(tl[k].count <= tl[k - 1].count);
  for (std::size_t k = 1; k + 1 < tl.size(); ++k)
    if (tl[k].count == 1 && tl[k - 1].count == 1) CHECK(tl[k].volumes[0] <= tl[k - 1].volumes[0]);
  CHECK(component_timeline(RunResult{}).empty());
}

TEST_CASE("immediate escape when u0 is above the ceiling") {
  const Grid g = Grid::cube(2, 1.0, 9);
  std::vector<double> u0(g.size(), 50.0);
  const RunResult r = solve_dirichlet(g, u0, 20.0, CurvatureFunctionSpec::mean(2), weak_cfg());
  CHECK(r.stop_reason == StopReason::escaped);
  CHECK(*r.escape_time == 0.0);
  CHECK(r.steps == 0);
}

TEST_CASE("shell too small for the ceiling") {
  const Grid g = Grid::cube(2, 0.9, 37);
  CHECK_THROWS_AS(solve_dirichlet(g, sample_ball(g, 1.0), 20.0, CurvatureFunctionSpec::mean(2), weak_cfg()),
                  ConfigError);
}

TEST_CASE("ladder: single ceiling, thread independence, comparisons") {
  const Grid g = Grid::cube(2, 2.0, 25);
  StepperConfig cfg = weak_cfg();
  cfg.t_end = 0.3;
  cfg.snapshot_every = 0.1;
  const auto spec = CurvatureFunctionSpec::mean(2);
  const auto u0 = sample_ball(g, 1.0);

  LadderConfig one;
  one.L_values = {10.0};
  const LadderResult single = ladder_run(g, u0, one, spec, cfg);
  CHECK(single.runs.size() == 1);
  CHECK(single.table.empty());

  LadderConfig two;
  two.L_values = {10.0, 20.0};
  const LadderResult a = ladder_run(g, u0, two, spec, cfg, 1);
  const LadderResult b = ladder_run(g, u0, two, spec, cfg, 2);
  REQUIRE(a.table.size() == 1);
  CHECK(a.table[0].L_low == 10.0);
  CHECK(a.table[0].threshold == doctest::Approx(1e-2));
  for (std::size_t k = 0; k < 2; ++k)
    CHECK(a.runs[k].snapshots.back().u == b.runs[k].snapshots.back().u);
  CHECK(a.table[0].max_diff == b.table[0].max_diff);

  const StabilizationRow self = compare_ceilings(a.runs[0], a.runs[0], 1e-3);
  CHECK(self.max_diff == 0.0);
  CHECK(self.stabilized);
  CHECK(self.series.size() == a.runs[0].snapshots.size());
}

TEST_CASE("ladder validation") {
  LadderConfig c;
  c.L_values = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.L_values = {20, 10};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.L_values = {2};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("dumbbell geometry") {
  Dumbbell db;
  CHECK_NOTHROW(db.validate());
  CHECK(db.inside_distance(1.0, 0.0) == doctest::Approx(0.5));
  CHECK(db.inside_distance(0.0, 0.0) == doctest::Approx(0.15));
  CHECK(db.inside_distance(0.0, 0.5) < 0.0);
  Dumbbell bad{0.5, 1.0, 0.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {0.5, 0.4, 0.1};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  const double x[2] = {1.0, 0.0};
  CHECK(dumbbell_initial_value(x, db) == doctest::Approx(2.0 + 1.0));
}
