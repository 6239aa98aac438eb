#include "curveflow/ladder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <thread>

#include "curveflow/errors.hpp"

namespace curveflow {

void LadderConfig::validate() const {
  if (L_values.empty()) throw ConfigError("ladder needs at least one ceiling");
  for (std::size_t i = 0; i < L_values.size(); ++i) {
    if (L_values[i] < 4.0) throw ConfigError("ladder ceilings must be >= 4");
    if (i > 0 && !(L_values[i] > L_values[i - 1])) {
      throw ConfigError("ladder ceilings must be strictly increasing");
    }
  }
  if (!(stabilization_tol > 0.0)) throw ConfigError("stabilization_tol must be positive");
}

RunResult solve_dirichlet(const Grid& grid, std::span<const double> u0, double L,
                          const CurvatureFunctionSpec& spec, const StepperConfig& cfg) {
  FieldState state = initialize(grid, u0, L, cfg, spec, BoundaryCondition::constant_L);
  return run(std::move(state), spec, cfg);
}

StabilizationRow compare_ceilings(const RunResult& low, const RunResult& high, double tol) {
  if (!low.grid.same_layout(high.grid)) throw ConfigError("ladder runs use different grids");
  StabilizationRow row;
  row.L_low = low.L;
  row.L_high = high.L;
  row.threshold = tol * low.L;
  const double level = low.L - low.escape_gap;
  std::size_t j = 0;
  for (const Snapshot& a : low.snapshots) {
    if (a.companion) continue;
    while (j < high.snapshots.size() &&
           (high.snapshots[j].companion || high.snapshots[j].t < a.t - 1e-12)) {
      ++j;
    }
    if (j == high.snapshots.size()) break;
    const Snapshot& b = high.snapshots[j];
    if (std::abs(b.t - a.t) > 1e-12) continue;
    double diff = 0.0;
    for (std::size_t i = 0; i < a.u.size(); ++i) {
      if (!low.grid.interior(i) || b.u[i] >= level) continue;
      diff = std::max(diff, std::abs(a.u[i] - b.u[i]));
    }
    row.series.emplace_back(a.t, diff);
    row.max_diff = std::max(row.max_diff, diff);
  }
  row.stabilized = row.max_diff <= row.threshold;
  return row;
}

LadderResult ladder_run(const Grid& grid, std::span<const double> u0, const LadderConfig& ladder,
                        const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
                        int threads) {
  ladder.validate();
  const std::size_t n = ladder.L_values.size();
  LadderResult result;
  result.runs.resize(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      try {
        result.runs[k] = solve_dirichlet(grid, u0, ladder.L_values[k], spec, cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(n));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    result.table.push_back(
        compare_ceilings(result.runs[k], result.runs[k + 1], ladder.stabilization_tol));
  }
  return result;
}

DomainSlice extract_domain(const FieldState& state, double gap) {
  const Grid& grid = state.grid;
  const std::size_t n = grid.size();
  const int d = grid.dim();
  const double level = state.ceiling() - gap;
  DomainSlice slice;
  slice.t = state.t;
  slice.inside.assign(n, 0);
  slice.boundary.assign(n, 0);
  slice.labels.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) slice.inside[i] = state.u[i] < level ? 1 : 0;

  // Lattice offsets strictly inside the ball of radius 2h.
  std::vector<std::array<int, 3>> ball;
  for (int a = -1; a <= 1; ++a)
    for (int b = (d > 1 ? -1 : 0); b <= (d > 1 ? 1 : 0); ++b)
      for (int c = (d > 2 ? -1 : 0); c <= (d > 2 ? 1 : 0); ++c)
        if (a * a + b * b + c * c < 4) ball.push_back({a, b, c});

  for (std::size_t i = 0; i < n; ++i) {
    const auto base = grid.multi_index(i);
    bool saw_in = false;
    bool saw_out = false;
    for (const auto& o : ball) {
      std::array<int, 3> j{base[0] + o[0], base[1] + o[1], base[2] + o[2]};
      bool valid = true;
      for (int a = 0; a < d; ++a) valid = valid && j[a] >= 0 && j[a] < grid.n(a);
      if (!valid) continue;
      (slice.inside[grid.linear_index(j)] ? saw_in : saw_out) = true;
    }
    slice.boundary[i] = saw_in && saw_out ? 1 : 0;
  }

  // Face-adjacent flood fill.
  struct Raw {
    std::size_t size = 0;
    std::array<int, 3> seed{};
  };
  std::vector<Raw> raw;
  std::vector<int> raw_label(n, -1);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) {
    if (!slice.inside[i] || raw_label[i] >= 0) continue;
    const int label = static_cast<int>(raw.size());
    Raw comp;
    comp.seed = grid.multi_index(i);
    raw_label[i] = label;
    queue.push_back(i);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      ++comp.size;
      const auto ci = grid.multi_index(cur);
      // lexicographic order with x_1 most significant
      if (std::lexicographical_compare(ci.begin(), ci.begin() + d, comp.seed.begin(),
                                       comp.seed.begin() + d)) {
        comp.seed = ci;
      }
      for (int a = 0; a < d; ++a) {
        for (int s : {-1, 1}) {
          const int k = ci[a] + s;
          if (k < 0 || k >= grid.n(a)) continue;
          const std::size_t nb = s > 0 ? cur + grid.stride(a) : cur - grid.stride(a);
          if (slice.inside[nb] && raw_label[nb] < 0) {
            raw_label[nb] = label;
            queue.push_back(nb);
          }
        }
      }
    }
    raw.push_back(comp);
  }

  std::vector<int> order(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) order[k] = static_cast<int>(k);
  std::sort(order.begin(), order.end(), [&](int p, int q) {
    if (raw[p].size != raw[q].size) return raw[p].size > raw[q].size;
    return std::lexicographical_compare(raw[p].seed.begin(), raw[p].seed.begin() + d,
                                        raw[q].seed.begin(), raw[q].seed.begin() + d);
  });
  std::vector<int> relabel(raw.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    relabel[order[k]] = static_cast<int>(k);
    slice.component_sizes.push_back(raw[order[k]].size);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (raw_label[i] >= 0) slice.labels[i] = relabel[raw_label[i]];
  }
  return slice;
}

std::vector<ComponentRecord> component_timeline(const RunResult& run) {
  std::vector<ComponentRecord> out;
  const double cell = std::pow(run.grid.h(), run.grid.dim());
  for (std::size_t k : run.regular_snapshots()) {
    const DomainSlice s = extract_domain(run.state_at(k), run.escape_gap);
    ComponentRecord rec{s.t, s.component_count(), {}};
    for (std::size_t sz : s.component_sizes) rec.volumes.push_back(sz * cell);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace curveflow
