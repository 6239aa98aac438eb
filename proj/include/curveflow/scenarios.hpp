#pragma once

#include <string>
#include <vector>

#include "curveflow/grid.hpp"

namespace curveflow {

/// u0 = 1/dist(x, dB_rho) + |x|^2 on the ball B_rho(0); +inf (undefined) outside.
double ball_initial_value(std::span<const double> x, double rho);

/// Same profile as a function of the radius alone.
double ball_radial_profile(double r, double rho);

/// Two discs of radius a centred at (+-c, 0), joined along the x axis by a neck of
/// half-width w. Planar (d = 2) only.
struct Dumbbell {
  double a = 0.5;
  double c = 1.0;
  double w = 0.15;

  /// Throws ConfigError unless 0 < w < a < c, which keeps the set connected.
  void validate() const;
  /// Exact distance from an interior point to the boundary; negative outside.
  double inside_distance(double x, double y) const;
};

double dumbbell_initial_value(std::span<const double> x, const Dumbbell& db);

std::vector<double> sample_ball(const Grid& grid, double rho);
std::vector<double> sample_dumbbell(const Grid& grid, const Dumbbell& db);

/// Nodal values from CSV rows `x_1,...,x_d,u` (lines starting with '#' are ignored).
/// Nodes without a row, and `inf`/`nan` values, are undefined. Throws ConfigError on
/// malformed rows or coordinates that miss the grid.
std::vector<double> read_nodal_csv(const Grid& grid, const std::string& path);

}  // namespace curveflow
