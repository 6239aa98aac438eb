#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "curveflow/curvature_functions.hpp"
#include "curveflow/flow_solver.hpp"
#include "curveflow/grid.hpp"

namespace curveflow {

struct LadderConfig {
  std::vector<double> L_values{20.0, 40.0, 80.0};
  /// Stabilization threshold as a fraction of the smaller ceiling of each pair.
  double stabilization_tol = 1e-3;

  void validate() const;
};

/// One Dirichlet run at ceiling L with boundary value L. Shell and admissibility
/// preconditions are checked by `initialize`.
RunResult solve_dirichlet(const Grid& grid, std::span<const double> u0, double L,
                          const CurvatureFunctionSpec& spec, const StepperConfig& cfg);

struct StabilizationRow {
  double L_low = 0.0;
  double L_high = 0.0;
  /// (t, max |u^low - u^high|) over {u^high < L_low - gap} at common snapshot times.
  std::vector<std::pair<double, double>> series;
  double max_diff = 0.0;
  double threshold = 0.0;
  bool stabilized = true;
};

struct LadderResult {
  std::vector<RunResult> runs;  // one per L, in ladder order
  std::vector<StabilizationRow> table;
};

/// Runs every ceiling of the ladder (up to `threads` at once; results do not depend on it)
/// and compares consecutive pairs on the sublevel set where the lower ceiling is informative.
LadderResult ladder_run(const Grid& grid, std::span<const double> u0, const LadderConfig& ladder,
                        const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
                        int threads = 1);

/// Compares two runs of the ladder at common snapshot times.
StabilizationRow compare_ceilings(const RunResult& low, const RunResult& high, double tol);

/// Extracted sublevel region {u < L - gap} at one time.
struct DomainSlice {
  double t = 0.0;
  std::vector<std::uint8_t> inside;
  /// Cells whose open 2h-neighbourhood meets both the region and its complement.
  std::vector<std::uint8_t> boundary;
  /// Component label per cell, -1 outside. Labels ordered by size (descending), then by
  /// the lexicographically smallest cell.
  std::vector<int> labels;
  std::vector<std::size_t> component_sizes;

  std::size_t component_count() const { return component_sizes.size(); }
};

DomainSlice extract_domain(const FieldState& state, double gap = 2.0);

struct ComponentRecord {
  double t = 0.0;
  std::size_t count = 0;
  std::vector<double> volumes;  // cells * h^d, in label order
};

/// Component count and volumes at every regular snapshot of a run.
std::vector<ComponentRecord> component_timeline(const RunResult& run);

}  // namespace curveflow
