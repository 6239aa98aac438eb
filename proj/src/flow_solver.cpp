#include "curveflow/flow_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "curveflow/errors.hpp"
#include "curveflow/graph_geometry.hpp"

namespace curveflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_point(const Grid& grid, std::size_t idx) {
  const auto x = grid.coords(idx);
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < grid.dim(); ++a) os << (a ? ", " : "") << x[a];
  os << ")";
  return os.str();
}

std::string format_kappa(const CurvatureVector& k) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < k.size(); ++i) os << (i ? ", " : "") << k[i];
  os << ")";
  return os.str();
}

// One pass of the normalized (1, 2, 1)^d kernel over interior nodes. A node whose stencil
// touches undefined data (+inf) becomes undefined.
void smooth_once(const Grid& grid, std::vector<double>& u) {
  std::vector<double> out = u;
  const int d = grid.dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.interior(i)) continue;
    double sum = 0.0;
    double wsum = 0.0;
    std::array<int, 3> off{-1, -1, -1};
    for (int a = d; a < 3; ++a) off[a] = 0;
    for (;;) {
      double w = 1.0;
      std::ptrdiff_t shift = 0;
      for (int a = 0; a < d; ++a) {
        w *= (off[a] == 0 ? 2.0 : 1.0);
        shift += off[a] * static_cast<std::ptrdiff_t>(grid.stride(a));
      }
      sum += w * u[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + shift)];
      wsum += w;
      int a = 0;
      while (a < d && ++off[a] > 1) off[a++] = -1;
      if (a == d) break;
    }
    out[i] = sum / wsum;
  }
  u.swap(out);
}

struct NodeEval {
  double speed = 0.0;
  double trace = 0.0;
  bool pinned = false;
};

// Speed W f(kappa) and tr(gamma dF_dA gamma) at an active node; throws on NaN and on cone
// exit unless the node is held. Nodes whose stencil reaches the frozen cap see the
// truncated wall and are always held.
NodeEval evaluate_node(const FieldState& state, std::size_t idx, double shift,
                       const CurvatureFunctionSpec& spec, SpeedValue& scratch, bool hold_exits) {
  const NodeDerivatives nd = graph_derivatives(state.grid, state.u, idx, shift);
  if (!nd.gradient.allFinite() || !nd.hessian.allFinite()) {
    throw NumericalFault("non-finite derivatives at " + format_point(state.grid, idx) +
                         ", t=" + std::to_string(state.t));
  }
  const ShapeOperatorSample s = shape_operator(nd.gradient, nd.hessian);
  if (int j = try_eval_f_with_grad(spec, s.kappa, scratch); j != 0) {
    if (hold_exits || !stencil_clear_of_cap(state, idx)) return NodeEval{0.0, 0.0, true};
    throw AdmissibilityError("admissibility lost at " + format_point(state.grid, idx) +
                                 ", t=" + std::to_string(state.t) + ": kappa=" +
                                 format_kappa(s.kappa) + " has H_" + std::to_string(j) +
                                 " <= 0",
                             idx,
                             std::vector<double>(s.kappa.data(),
                                                 s.kappa.data() + s.kappa.size()));
  }
  NodeEval out;
  out.speed = s.W * scratch.f;
  for (int k = 0; k < s.kappa.size(); ++k) {
    out.trace += scratch.grad[k] * (s.gamma * s.eigenvectors.col(k)).squaredNorm();
  }
  if (!std::isfinite(out.speed)) {
    throw NumericalFault("non-finite speed at " + format_point(state.grid, idx));
  }
  return out;
}

double max_trace(const FieldState& state, const CurvatureFunctionSpec& spec, bool hold_exits,
                 std::vector<double>* speeds, std::size_t* pinned = nullptr) {
  SpeedValue scratch;
  const double shift = reciprocal_shift(state.u);
  double tr = 0.0;
  for (std::size_t i = 0; i < state.grid.size(); ++i) {
    if (!state.active(i)) continue;
    const NodeEval e = evaluate_node(state, i, shift, spec, scratch, hold_exits);
    tr = std::max(tr, e.trace);
    if (speeds) (*speeds)[i] = e.speed;
    if (pinned && e.pinned) ++*pinned;
  }
  return tr;
}

double dt_from_trace(const FieldState& state, const StepperConfig& cfg, double tr,
                     double dt_cap) {
  if (tr <= 0.0) return dt_cap;
  const double h = state.grid.h();
  const double dt = cfg.sigma * h * h / (2.0 * tr);
  if (dt < cfg.dt_min) {
    throw StiffnessError("stable step " + std::to_string(dt) + " below dt_min at t=" +
                         std::to_string(state.t) + " (near extinction)");
  }
  return std::min(dt, dt_cap);
}

}  // namespace

void StepperConfig::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("sigma must lie in (0, 1)");
  if (!(dt_min > 0.0)) throw ConfigError("dt_min must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
  if (!(snapshot_every > 0.0)) throw ConfigError("snapshot_every must be positive");
  if (!(epsilon_cutoff > 0.0)) throw ConfigError("epsilon_cutoff must be positive");
  if (!(boost_step > 0.0) || boost_cap < 1) throw ConfigError("invalid auto_boost settings");
  if (smoothing_passes < 0) throw ConfigError("smoothing_passes must be >= 0");
  if (!(escape_gap > 0.0)) throw ConfigError("escape_gap must be positive");
  if (!(companion_dt >= 0.0)) throw ConfigError("companion_dt must be >= 0");
}

double min_eps_cutoff(double a, double b, double eps, CutoffBlend blend) {
  if (!(eps > 0.0)) throw ConfigError("min_eps needs eps > 0");
  const double x = (a - b) / eps;
  double g;
  if (x <= -1.0) {
    g = x;
  } else if (x >= 1.0) {
    g = 0.0;
  } else if (blend == CutoffBlend::quadratic) {
    g = -0.25 * (1.0 - x) * (1.0 - x);
  } else {
    // g' = 1 - (3s^2 - 2s^3) with s = (x + 1) / 2
    const double s = 0.5 * (x + 1.0);
    g = -1.0 + 2.0 * s - 2.0 * s * s * s + s * s * s * s;
  }
  return eps * g + b;
}

double cutoff_width(const StepperConfig& cfg, double L) {
  return cfg.epsilon_cutoff * std::max(std::abs(L), 1.0);
}

FieldState initialize(const Grid& grid, std::span<const double> u0, double L,
                      const StepperConfig& cfg, const CurvatureFunctionSpec& spec,
                      BoundaryCondition bc) {
  cfg.validate();
  if (u0.size() != grid.size()) throw ConfigError("initial data size does not match the grid");
  if (spec.dim != grid.dim()) throw ConfigError("speed dimension does not match the grid");

  FieldState state;
  state.grid = grid;
  state.L = L;
  state.bc = bc;
  state.t = 0.0;
  const double top = state.ceiling();
  const double eps = cutoff_width(cfg, top);
  state.cap_margin = 0.25 * eps;

  double worst_radius = -1.0;
  std::size_t worst_node = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = u0[i];
    if (std::isinf(v) && v < 0) throw ConfigError("initial data contains -inf");
    if (!grid.on_boundary(i) || !std::isfinite(v) || v >= top + 1.0) continue;
    const auto x = grid.coords(i);
    double r = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r = std::max(r, std::abs(x[a]));
    if (r > worst_radius) {
      worst_radius = r;
      worst_node = i;
    }
  }
  if (worst_radius >= 0.0) {
    std::ostringstream os;
    os << "initial data " << u0[worst_node] << " < L+1 = " << top + 1.0
       << " on the boundary shell at " << format_point(grid, worst_node)
       << "; the box must extend beyond the region where u0 < L+1 (needs R > "
       << worst_radius << ")";
    throw ConfigError(os.str());
  }

  auto build = [&](double mu) {
    std::vector<double> u(u0.begin(), u0.end());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!std::isfinite(u[i])) {
        u[i] = kInf;
      } else if (mu > 0.0) {
        const auto x = grid.coords(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += x[a] * x[a];
        u[i] += mu * r2;
      }
    }
    for (int p = 0; p < cfg.smoothing_passes; ++p) smooth_once(grid, u);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      u[i] = std::isfinite(u[i]) ? min_eps_cutoff(u[i], top, eps, cfg.blend) : top;
      if (grid.on_boundary(i) || u[i] >= top - state.cap_margin) u[i] = top;
    }
    return u;
  };

  state.u = build(0.0);
  AdmissibilityReport rep = admissibility_check(spec, state);
  if (rep.status == AdmissibilityStatus::violated &&
      cfg.admissibility_mode == AdmissibilityMode::auto_boost) {
    for (int b = 1; b <= cfg.boost_cap && rep.status == AdmissibilityStatus::violated; ++b) {
      state.u = build(b * cfg.boost_step);
      rep = admissibility_check(spec, state);
    }
  }
  if (rep.status == AdmissibilityStatus::violated &&
      cfg.admissibility_mode != AdmissibilityMode::weak) {
    const auto& v = rep.violations.front();
    std::ostringstream os;
    os << "initial data not admissible for " << spec.name() << ": " << rep.violations.size()
       << " violating node(s), first at " << format_point(grid, v.node) << " with H_"
       << v.violated_index << " <= 0";
    throw AdmissibilityError(os.str(), v.node, v.kappa);
  }
  return state;
}

double stable_dt(const FieldState& state, const CurvatureFunctionSpec& spec,
                 const StepperConfig& cfg, double dt_cap) {
  const bool hold = cfg.admissibility_mode == AdmissibilityMode::weak;
  return dt_from_trace(state, cfg, max_trace(state, spec, hold, nullptr), dt_cap);
}

StepStats step(FieldState& state, const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
               double dt_cap) {
  const Grid& grid = state.grid;
  std::vector<double> speeds(grid.size(), 0.0);
  StepStats stats;
  const bool hold = cfg.admissibility_mode == AdmissibilityMode::weak;
  stats.max_trace = max_trace(state, spec, hold, &speeds, &stats.pinned);
  stats.dt = dt_from_trace(state, cfg, stats.max_trace, dt_cap);

  const double top = state.ceiling();
  const double band = top - cutoff_width(cfg, top);
  const double shift = reciprocal_shift(state.u);
  std::vector<double> next(grid.size());
  double min_u = kInf;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double old = state.u[i];
    double v;
    if (grid.on_boundary(i)) {
      next[i] = top;
      continue;
    }
    if (state.frozen(i)) {
      v = top;
    } else {
      // Euler step for w = 1/(u + shift): w_t = -w^2 u_t; its diffusion matrix is C again
      const double w = 1.0 / (old + shift);
      const double w_new = w - stats.dt * w * w * speeds[i];
      v = w_new > 0.0 ? 1.0 / w_new - shift : kInf;
      if (v >= top - state.cap_margin) v = top;
    }
    if (old < band) worst = std::min(worst, v - old);
    next[i] = v;
    min_u = std::min(min_u, v);
  }
  state.u.swap(next);
  state.t += stats.dt;
  stats.min_interior_u = min_u;
  stats.worst_descent = worst;
  return stats;
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::reached_t_end:
      return "reached_t_end";
    case StopReason::escaped:
      return "escaped";
    case StopReason::stiffness:
      return "stiffness";
  }
  return "unknown";
}

FieldState RunResult::state_at(std::size_t k) const {
  FieldState s;
  s.grid = grid;
  s.u = snapshots.at(k).u;
  s.t = snapshots.at(k).t;
  s.L = L;
  s.bc = bc;
  s.cap_margin = cap_margin;
  return s;
}

std::vector<std::size_t> RunResult::regular_snapshots() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    if (!snapshots[k].companion) out.push_back(k);
  }
  return out;
}

RunResult run(FieldState state, const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
              const std::vector<SnapshotObserver>& observers) {
  cfg.validate();
  RunResult result;
  result.grid = state.grid;
  result.L = state.L;
  result.bc = state.bc;
  result.cap_margin = state.cap_margin;
  result.escape_gap = cfg.escape_gap;
  result.speed = spec.name();
  result.min_dt = kInf;

  const double top = state.ceiling();
  auto record = [&](bool companion) {
    result.snapshots.push_back({state.t, state.u, companion});
    for (const auto& obs : observers) obs(state, companion);
  };
  auto escaped = [&] {
    for (std::size_t i = 0; i < state.grid.size(); ++i) {
      if (state.grid.interior(i) && state.u[i] < top - cfg.escape_gap) return false;
    }
    return true;
  };

  record(false);
  if (escaped()) {
    result.stop_reason = StopReason::escaped;
    result.escape_time = state.t;
    return result;
  }

  const double t0 = state.t;
  const double t_end = t0 + cfg.t_end;
  long next_index = 1;
  auto next_snapshot_time = [&] {
    return std::min(t0 + static_cast<double>(next_index) * cfg.snapshot_every, t_end);
  };

  auto do_step = [&](double dt_cap) -> StepStats {
    StepStats s = step(state, spec, cfg, dt_cap);
    ++result.steps;
    result.min_dt = std::min(result.min_dt, s.dt);
    result.worst_descent = std::min(result.worst_descent, s.worst_descent);
    result.pinned_node_steps += s.pinned;
    return s;
  };

  while (state.t < t_end) {
    const double target = next_snapshot_time();
    StepStats s;
    try {
      s = do_step(target - state.t);
    } catch (const StiffnessError& e) {
      result.stop_reason = StopReason::stiffness;
      result.stiffness_message = e.what();
      if (result.snapshots.back().t != state.t) record(false);
      return result;
    }
    bool at_snapshot = false;
    if (state.t >= target - 1e-12 * std::max(1.0, std::abs(target))) {
      state.t = target;
      ++next_index;
      at_snapshot = true;
    }
    const bool gone = s.min_interior_u >= top - cfg.escape_gap;
    if (at_snapshot || gone) record(false);
    if (gone) {
      result.stop_reason = StopReason::escaped;
      result.escape_time = state.t;
      return result;
    }
    if (at_snapshot && cfg.companion_dt > 0.0 && state.t < t_end) {
      try {
        s = do_step(std::min(cfg.companion_dt, t_end - state.t));
      } catch (const StiffnessError& e) {
        result.stop_reason = StopReason::stiffness;
        result.stiffness_message = e.what();
        return result;
      }
      record(true);
      if (s.min_interior_u >= top - cfg.escape_gap) {
        result.stop_reason = StopReason::escaped;
        result.escape_time = state.t;
        return result;
      }
    }
  }
  result.stop_reason = StopReason::reached_t_end;
  return result;
}

}  // namespace curveflow
