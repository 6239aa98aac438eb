#include "curveflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curveflow/errors.hpp"
#include "curveflow/graph_geometry.hpp"

namespace curveflow {

namespace {

MonitorReport make_report(std::string name, double tol) {
  MonitorReport rep;
  rep.name = std::move(name);
  rep.tolerance = tol;
  return rep;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_below_escape(const RunResult& run, double M) {
  if (!(M < run.ceiling() - run.escape_gap)) {
    throw ConfigError("monitor level M must lie below L - " + std::to_string(run.escape_gap));
  }
}

// Interior-estimate nodes: active and more than one stencil away from the cap.
template <typename Fn>
void for_each_clear_node(const FieldState& s, Fn&& fn) {
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    if (stencil_clear_of_cap(s, i)) fn(i);
  }
}

double relative_excess(double value, double baseline) {
  if (baseline > 0.0) return std::max(0.0, (value - baseline) / baseline);
  return value > baseline ? kInf : 0.0;
}

}  // namespace

double holder_threshold(double M) { return std::sqrt(2.0) * (M + 1.0); }

MonitorReport monitor_gradient_bound(const RunResult& run, double M, double tol) {
  require_below_escape(run, M);
  MonitorReport rep = make_report("gradient_bound", tol);
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const FieldState s = run.state_at(k);
    const double shift = reciprocal_shift(s.u);
    double value = 0.0;
    for_each_clear_node(s, [&](std::size_t i) {
      const double phi = M - s.u[i];
      if (phi <= 0.0) return;
      const NodeDerivatives nd = graph_derivatives(s.grid, s.u, i, shift);
      value = std::max(value, std::sqrt(1.0 + nd.gradient.squaredNorm()) * phi * phi);
    });
    if (k == 0) rep.baseline = value;
    rep.series.emplace_back(s.t, value);
    rep.worst_violation = std::max(rep.worst_violation, relative_excess(value, rep.baseline));
  }
  rep.vacuous = rep.baseline == 0.0 && rep.worst_violation == 0.0;
  rep.passed = rep.worst_violation <= tol;
  return rep;
}

MonitorReport monitor_speed_lower(const RunResult& run, double M,
                                  const CurvatureFunctionSpec& spec, double tol) {
  require_below_escape(run, M);
  MonitorReport rep = make_report("speed_lower", tol);
  bool have_baseline = false;
  std::size_t outside = 0;
  SpeedValue v;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const FieldState s = run.state_at(k);
    const double shift = reciprocal_shift(s.u);
    double value = kInf;
    for_each_clear_node(s, [&](std::size_t i) {
      const double phi = M - s.u[i];
      if (phi <= 0.0) return;
      const NodeDerivatives nd = graph_derivatives(s.grid, s.u, i, shift);
      const ShapeOperatorSample sample = shape_operator(nd.gradient, nd.hessian);
      if (try_eval_f_with_grad(spec, sample.kappa, v) != 0) {
        ++outside;
        return;
      }
      value = std::min(value, v.f / phi);
    });
    if (value == kInf) continue;  // empty sublevel set
    if (!have_baseline) {
      if (k != 0) break;  // the baseline must come from the initial state
      rep.baseline = value;
      have_baseline = true;
    }
    rep.series.emplace_back(s.t, value);
    const double drop = rep.baseline > 0.0 ? (rep.baseline - value) / rep.baseline : kInf;
    rep.worst_violation = std::max(rep.worst_violation, drop);
  }
  rep.vacuous = !have_baseline;
  if (rep.vacuous) rep.note = "empty sublevel set at t=0; ";
  rep.note += "node samples outside the cone skipped: " + std::to_string(outside);
  rep.passed = rep.worst_violation <= tol;
  return rep;
}

MonitorReport monitor_c2_bound(const RunResult& run, double M, double kappa_cap) {
  require_below_escape(run, M);
  MonitorReport rep = make_report("c2_bound", kappa_cap);
  double sup = 0.0;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const FieldState s = run.state_at(k);
    const double shift = reciprocal_shift(s.u);
    double value = 0.0;
    for_each_clear_node(s, [&](std::size_t i) {
      const double phi = M - s.u[i];
      if (phi <= 0.0) return;
      const NodeDerivatives nd = graph_derivatives(s.grid, s.u, i, shift);
      const double norm = nd.hessian.cwiseAbs().rowwise().sum().maxCoeff();
      value = std::max(value, norm * phi);
    });
    if (k == 0) rep.baseline = value;
    rep.series.emplace_back(s.t, value);
    sup = std::max(sup, value);
  }
  if (rep.baseline > 0.0) {
    rep.worst_violation = sup / rep.baseline;
  } else {
    rep.worst_violation = sup > 0.0 ? kInf : 0.0;
    rep.vacuous = sup == 0.0;
  }
  rep.note = "sup over time " + std::to_string(sup);
  rep.passed = rep.worst_violation <= kappa_cap;
  return rep;
}

MonitorReport monitor_f_ratio(const RunResult& run, const CurvatureFunctionSpec& spec,
                              double tol) {
  MonitorReport rep = make_report("f_ratio", tol);
  if (run.snapshots.empty()) {
    rep.vacuous = true;
    return rep;
  }
  // a from the initial state
  const FieldState s0 = run.state_at(0);
  const double shift0 = reciprocal_shift(s0.u);
  double min_nu = kInf;
  for_each_clear_node(s0, [&](std::size_t i) {
    const NodeDerivatives nd = graph_derivatives(s0.grid, s0.u, i, shift0);
    min_nu = std::min(min_nu, 1.0 / std::sqrt(1.0 + nd.gradient.squaredNorm()));
  });
  if (min_nu == kInf) {
    rep.vacuous = true;
    rep.note = "no active nodes at t=0";
    return rep;
  }
  const double a = 0.5 * min_nu;
  double min_f = kInf;
  std::size_t outside = 0;
  SpeedValue v;
  for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
    const FieldState s = run.state_at(k);
    const double shift = reciprocal_shift(s.u);
    double value = 0.0;
    bool any = false;
    for_each_clear_node(s, [&](std::size_t i) {
      const NodeDerivatives nd = graph_derivatives(s.grid, s.u, i, shift);
      const ShapeOperatorSample sample = shape_operator(nd.gradient, nd.hessian);
      if (try_eval_f_with_grad(spec, sample.kappa, v) != 0) {
        ++outside;
        return;
      }
      const double f = v.f;
      min_f = std::min(min_f, f);
      const double gap = sample.nu_vertical - a;
      value = std::max(value, gap > 0.0 ? f / gap : kInf);
      any = true;
    });
    if (!any) continue;
    if (k == 0) rep.baseline = value;
    rep.series.emplace_back(s.t, value);
    rep.worst_violation = std::max(rep.worst_violation, relative_excess(value, rep.baseline));
  }
  if (!(min_f > 0.0)) rep.worst_violation = kInf;
  rep.note = "a=" + std::to_string(a) + " min_f=" + std::to_string(min_f) +
             "; node samples outside the cone skipped: " + std::to_string(outside);
  rep.passed = rep.worst_violation <= tol;
  return rep;
}

MonitorReport monitor_holder(const RunResult& run, double M_h, double tol) {
  MonitorReport rep = make_report("holder", tol);
  if (run.snapshots.size() < 2) {
    rep.vacuous = true;
    rep.note = "fewer than 2 snapshots";
    return rep;
  }
  const Grid& grid = run.grid;

  // Gradient bound over {v <= 0} across the run.
  double M = 0.0;
  for (const Snapshot& snap : run.snapshots) {
    const double shift = reciprocal_shift(snap.u);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!grid.interior(i) || snap.u[i] > M_h) continue;
      const NodeDerivatives nd = graph_derivatives(grid, snap.u, i, shift);
      M = std::max(M, nd.gradient.norm());
    }
  }
  M = std::max(M, 1.0);
  const double window = 1.0 / (8.0 * M * M);
  const double threshold = holder_threshold(M);
  rep.gradient_bound = M;
  rep.time_window = window;
  rep.baseline = threshold;

  std::vector<std::size_t> order(run.snapshots.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t p, std::size_t q) { return run.snapshots[p].t < run.snapshots[q].t; });

  double worst_ratio = 0.0;
  for (std::size_t p = 0; p < order.size(); ++p) {
    const Snapshot& s1 = run.snapshots[order[p]];
    double pair_value = 0.0;
    bool pair_used = false;
    for (std::size_t q = p + 1; q < order.size(); ++q) {
      const Snapshot& s2 = run.snapshots[order[q]];
      const double dt = s2.t - s1.t;
      if (dt > window) break;
      if (dt <= 0.0) continue;
      bool used = false;
      const double root = std::sqrt(dt);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.interior(i)) continue;
        const double v1 = s1.u[i] - M_h;
        const double v2 = s2.u[i] - M_h;
        if (v1 > -1.0 && v2 > -1.0) continue;
        const double ratio = std::abs(v1 - v2) / root;
        pair_value = std::max(pair_value, ratio);
        ++rep.qualifying_pairs;
        used = true;
      }
      if (used) {
        ++rep.qualifying_time_pairs;
        pair_used = true;
      }
    }
    if (pair_used) {
      rep.series.emplace_back(s1.t, pair_value);
      worst_ratio = std::max(worst_ratio, pair_value);
    }
  }
  rep.worst_violation = std::max(0.0, worst_ratio / threshold - 1.0);
  if (rep.qualifying_time_pairs < 2) {
    rep.vacuous = true;
    rep.note = "fewer than 2 qualifying snapshot pairs (window " + std::to_string(window) + ")";
  }
  rep.passed = rep.worst_violation <= tol;
  return rep;
}

MonitorReport monitor_comparison(const RunResult& a, const RunResult& b,
                                 std::optional<double> C_cmp) {
  if (!a.grid.same_layout(b.grid) || a.L != b.L || a.bc != b.bc) {
    throw ConfigError("comparison runs must share grid, ceiling and boundary condition");
  }
  const double R = a.grid.max_half_width();
  const double c = C_cmp.value_or(10.0 * a.ceiling() / (R * R));
  const double h = a.grid.h();
  MonitorReport rep = make_report("comparison", c * h * h);
  std::size_t j = 0;
  bool any = false;
  for (const Snapshot& sa : a.snapshots) {
    if (sa.companion) continue;
    while (j < b.snapshots.size() && (b.snapshots[j].companion || b.snapshots[j].t < sa.t - 1e-12)) {
      ++j;
    }
    if (j == b.snapshots.size()) break;
    const Snapshot& sb = b.snapshots[j];
    if (std::abs(sb.t - sa.t) > 1e-12) continue;
    double value = -kInf;
    for (std::size_t i = 0; i < sa.u.size(); ++i) value = std::max(value, sa.u[i] - sb.u[i]);
    rep.series.emplace_back(sa.t, value);
    rep.worst_violation = any ? std::max(rep.worst_violation, value) : value;
    any = true;
  }
  rep.vacuous = !any;
  rep.passed = rep.worst_violation <= rep.tolerance;
  return rep;
}

}  // namespace curveflow
