#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "curveflow/linalg.hpp"

namespace curveflow {

/// Uniform Cartesian grid on the box [-R_0, R_0] x ... x [-R_{d-1}, R_{d-1}] with the
/// same spacing h along every axis. Axis 0 varies fastest in the linear node index.
class Grid {
 public:
  Grid() = default;

  /// Cube [-R, R]^d with `n` nodes per axis (n odd, so the origin is a node).
  static Grid cube(int dim, double half_width, int n);
  /// Box with per-axis node counts; the half-widths must give one common spacing.
  static Grid box(int dim, std::span<const double> half_widths, std::span<const int> n);

  int dim() const { return dim_; }
  double h() const { return h_; }
  int n(int axis) const { return n_[axis]; }
  double half_width(int axis) const { return half_width_[axis]; }
  double max_half_width() const;
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::array<int, 3> multi_index(std::size_t idx) const;
  std::size_t linear_index(const std::array<int, 3>& i) const;
  /// Coordinates of a node; unused trailing entries are zero.
  std::array<double, 3> coords(std::size_t idx) const;
  bool on_boundary(std::size_t idx) const;
  /// True when the whole 3^d neighbourhood of the node lies inside the grid.
  bool interior(std::size_t idx) const { return !on_boundary(idx); }

  bool same_layout(const Grid& other) const;

 private:
  int dim_ = 0;
  double h_ = 0.0;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> half_width_{0.0, 0.0, 0.0};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::size_t size_ = 0;
};

/// First and second central differences at an interior node. Mixed derivatives use the
/// four-point corner stencil.
struct NodeDerivatives {
  SmallVector gradient;
  SmallMatrix hessian;
};

NodeDerivatives central_derivatives(const Grid& grid, std::span<const double> u,
                                    std::size_t idx);

/// 1 - min(0, min u): the shift c that keeps u + c >= 1 in graph_derivatives.
double reciprocal_shift(std::span<const double> u);

/// Du and D^2u from central differences of v = 1 / (u + shift) through the chain rule
/// Du = -Dv / v^2, D^2u = -D^2v / v^2 + 2 Dv Dv^T / v^3. Walls where u grows like
/// 1/dist are distance-like in v and stay resolved while u itself jumps by many units
/// per cell. Second order on smooth data; used by the stepper, the admissibility check
/// and the monitors.
NodeDerivatives graph_derivatives(const Grid& grid, std::span<const double> u, std::size_t idx,
                                  double shift);

enum class BoundaryCondition { constant_L, constant_zero };

/// Discrete graph u on a grid at time t. Nodes with u >= ceiling - cap_margin sit on the
/// flat cap and are not updated by the stepper.
struct FieldState {
  Grid grid;
  std::vector<double> u;
  double t = 0.0;
  double L = 0.0;
  BoundaryCondition bc = BoundaryCondition::constant_L;
  double cap_margin = 0.0;

  double ceiling() const { return bc == BoundaryCondition::constant_L ? L : 0.0; }
  bool frozen(std::size_t idx) const { return u[idx] >= ceiling() - cap_margin; }
  /// Interior node that is not on the cap.
  bool active(std::size_t idx) const { return grid.interior(idx) && !frozen(idx); }
};

/// True when every node of the 3^d stencil around `idx` is active.
bool stencil_clear_of_cap(const FieldState& state, std::size_t idx);

}  // namespace curveflow
