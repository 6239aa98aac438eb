#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curveflow/curvature_functions.hpp"
#include "curveflow/grid.hpp"

namespace curveflow {

/// Blend g used by the smooth minimum. Both equal min(x, 0) for |x| >= 1 and have
/// 0 <= g' <= 1. `quadratic` is C^1 (-(1-x)^2/4 on (-1, 1)); `smooth_c2` is C^2.
enum class CutoffBlend { quadratic, smooth_c2 };

/// strict: any cone exit away from the cap interface is an error.
/// auto_boost: as strict, after adding mu |x|^2 to the data until it checks admissible.
/// weak: nodes whose discrete curvature leaves the cone hold still for that step and are
/// counted; the initial check reports them instead of throwing.
enum class AdmissibilityMode { strict, auto_boost, weak };

struct StepperConfig {
  double sigma = 0.4;             // CFL safety factor, 0 < sigma < 1
  double dt_min = 1e-12;
  double t_end = 1.0;
  double snapshot_every = 0.05;
  double epsilon_cutoff = 0.05;   // smoothing width of min_eps, as a fraction of L
  CutoffBlend blend = CutoffBlend::quadratic;
  AdmissibilityMode admissibility_mode = AdmissibilityMode::strict;
  double boost_step = 0.1;        // mu increment for auto_boost
  int boost_cap = 100;            // number of mu increments before giving up
  int smoothing_passes = 1;       // 3^d kernel passes applied to u0 before capping
  double escape_gap = 2.0;        // escaped once every interior node has u >= L - escape_gap
  /// When positive, every regular snapshot is followed by one extra step of this size and a
  /// companion snapshot, giving closely spaced time pairs for the Holder check.
  double companion_dt = 0.0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// min_eps{a, b} = eps g((a - b) / eps) + b. Equals min(a, b) whenever |a - b| >= eps.
double min_eps_cutoff(double a, double b, double eps, CutoffBlend blend = CutoffBlend::quadratic);

/// Absolute cutoff width eps = epsilon_cutoff * |L| (at least epsilon_cutoff when L = 0).
double cutoff_width(const StepperConfig& cfg, double L);

/// Initial Dirichlet state from sampled data. Non-finite entries of `u0` mark nodes outside
/// the domain of u0 and are capped to L. Checks u0 >= L + 1 on the boundary shell, applies
/// the mollifying passes, caps with min_eps and verifies admissibility.
FieldState initialize(const Grid& grid, std::span<const double> u0, double L,
                      const StepperConfig& cfg, const CurvatureFunctionSpec& spec,
                      BoundaryCondition bc = BoundaryCondition::constant_L);

/// sigma h^2 / (2 max tr C) over active nodes, clamped above by `dt_cap`.
/// Throws StiffnessError when the unclamped step falls below dt_min.
double stable_dt(const FieldState& state, const CurvatureFunctionSpec& spec,
                 const StepperConfig& cfg, double dt_cap);

struct StepStats {
  double dt = 0.0;
  double max_trace = 0.0;
  double min_interior_u = 0.0;  // after the update
  double worst_descent = 0.0;   // most negative u_new - u_old below the cap band (<= 0)
  std::size_t pinned = 0;       // nodes held still after leaving the cone
};

/// One forward Euler step of u_t = W F(gamma D^2u gamma / W) at every active node, followed
/// by the boundary reset and the clamp to the ceiling. Derivatives come from
/// graph_derivatives and the Euler update is taken in w = 1 / (u + shift), which obeys
/// w_t = -w^2 u_t with the same diffusion matrix C, so the step bound is unchanged.
/// Double buffered.
StepStats step(FieldState& state, const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
               double dt_cap);

enum class StopReason { reached_t_end, escaped, stiffness };

std::string to_string(StopReason r);

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
  bool companion = false;
};

struct RunResult {
  Grid grid;
  double L = 0.0;
  BoundaryCondition bc = BoundaryCondition::constant_L;
  double cap_margin = 0.0;
  double escape_gap = 2.0;
  std::string speed;
  std::vector<Snapshot> snapshots;
  StopReason stop_reason = StopReason::reached_t_end;
  std::optional<double> escape_time;
  std::size_t steps = 0;
  double worst_descent = 0.0;
  std::size_t pinned_node_steps = 0;
  double min_dt = 0.0;
  std::string stiffness_message;

  double ceiling() const { return bc == BoundaryCondition::constant_L ? L : 0.0; }
  /// FieldState view of snapshot k.
  FieldState state_at(std::size_t k) const;
  /// Indices of non-companion snapshots.
  std::vector<std::size_t> regular_snapshots() const;
};

using SnapshotObserver = std::function<void(const FieldState&, bool companion)>;

/// Steps until t_end, escape (every interior u >= ceiling - escape_gap) or step-size
/// collapse. Snapshot times are hit exactly. Admissibility loss and NaN propagate as
/// exceptions.
RunResult run(FieldState state, const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
              const std::vector<SnapshotObserver>& observers = {});

}  // namespace curveflow
