#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "curveflow/curvature_functions.hpp"
#include "curveflow/flow_solver.hpp"

namespace curveflow {

/// (kappa_rad, kappa_ang, ..., kappa_ang) of a rotationally symmetric graph u(r) in
/// dimension d. At r = 0 all entries equal u_rr / (1 + u_r^2)^{3/2}. Throws ConfigError
/// for r < 0.
CurvatureVector radial_curvatures(double u_r, double u_rr, double r, int dim);

struct RadialOptions {
  int nodes = 4096;          // nodes on [0, R], including both ends
  double radius = 1.0;       // R; u(R) = L
  double dt_max = 1e-3;
  /// Front CFL: where the angular slope is upwinded, the front moves at most this many
  /// cells per step.
  double front_cfl = 0.5;
  /// Largest vertical increment per step at nodes away from the front.
  double du_max = 0.05;
};

struct RadialRunResult {
  int dim = 2;
  double dr = 0.0;
  double L = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<std::pair<double, double>> u_min;  // (t, min u) after every step
  StopReason stop_reason = StopReason::reached_t_end;
  std::optional<double> escape_time;
  std::size_t steps = 0;
  double worst_descent = 0.0;

  /// Linear interpolation of snapshot k at radius r (clamped to [0, R]).
  double value_at(std::size_t k, double r) const;
};

/// Rotationally symmetric flow on [0, R] with u(R) = L, the axis regularized by the ghost
/// value u(-dr) = u(dr). Each step solves the linearly implicit system
/// u_new - dt (a u_rr + b u_r) = u with a = f_rad / W^2, b = sum f_ang / r frozen at the
/// old state; u_r in the angular term is upwinded where the cell Peclet number exceeds 2.
/// `profile(r)` may return +inf outside its domain.
RadialRunResult radial_run(const std::function<double(double)>& profile, double L,
                           const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
                           const RadialOptions& opts = {});

/// rho(t) = sqrt(rho0^2 - 2 c_f t) with c_f = f(1, ..., 1, 0).
/// Throws DomainError when the cylinder vector is not inside the cone, ExtinctionError
/// past the extinction time.
double cylinder_radius(double rho0, double t, const CurvatureFunctionSpec& spec);

/// rho0^2 / (2 c_f).
double cylinder_extinction_time(double rho0, const CurvatureFunctionSpec& spec);

/// f(1/r, ..., 1/r); throws ConditionViolation unless it equals 1/r to 1e-12 (relative).
double sphere_speed_check(double r, const CurvatureFunctionSpec& spec);

}  // namespace curveflow
