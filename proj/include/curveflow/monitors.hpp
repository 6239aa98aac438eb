#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curveflow/curvature_functions.hpp"
#include "curveflow/flow_solver.hpp"

namespace curveflow {

/// Time series of one maximum-principle quantity. `passed` iff worst_violation <= tolerance.
struct MonitorReport {
  std::string name;
  double tolerance = 0.0;
  double baseline = 0.0;
  std::vector<std::pair<double, double>> series;
  double worst_violation = 0.0;
  bool passed = true;
  /// No qualifying data at all; the monitor passed without checking anything.
  bool vacuous = false;
  std::string note;
  /// Holder monitor only: (node, time pair) combinations that met the hypotheses.
  std::size_t qualifying_pairs = 0;
  std::size_t qualifying_time_pairs = 0;
  /// Holder monitor only: gradient bound M over {u <= M_h} and the time window 1/(8M^2).
  double gradient_bound = 0.0;
  double time_window = 0.0;
};

/// max W (M - u)_+^2 may not rise above its initial value (relative slack `tol`).
MonitorReport monitor_gradient_bound(const RunResult& run, double M, double tol = 1e-2);

/// min over {u < M} of f / (M - u) may not fall below its initial value. Node samples
/// whose discrete curvature is outside the cone are skipped and counted in `note`.
MonitorReport monitor_speed_lower(const RunResult& run, double M,
                                  const CurvatureFunctionSpec& spec, double tol = 1e-2);

/// max over {u < M} of ||D^2 u||_inf (M - u) stays below kappa_cap times its initial value.
MonitorReport monitor_c2_bound(const RunResult& run, double M, double kappa_cap = 10.0);

/// max f / (nu - a) with a = min_{t=0} nu / 2 may not rise above its initial value, and
/// f stays positive. Samples outside the cone are skipped as in monitor_speed_lower.
MonitorReport monitor_f_ratio(const RunResult& run, const CurvatureFunctionSpec& spec,
                              double tol = 1e-2);

/// Time-Holder bound |v(t1) - v(t2)| / sqrt|t1 - t2| <= sqrt(2) (M + 1) for v = u - M_h,
/// checked on snapshot pairs closer than 1/(8 M^2) at nodes with v <= -1.
MonitorReport monitor_holder(const RunResult& run, double M_h, double tol = 5e-2);

/// max(u_a - u_b) at common snapshot times stays below C_cmp h^2,
/// C_cmp defaulting to 10 L / R^2.
MonitorReport monitor_comparison(const RunResult& a, const RunResult& b,
                                 std::optional<double> C_cmp = std::nullopt);

/// Threshold sqrt(2) (M + 1) of the Holder bound.
double holder_threshold(double M);

}  // namespace curveflow
