#include "curveflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curveflow/errors.hpp"

namespace curveflow {

Grid Grid::cube(int dim, double half_width, int n) {
  std::array<double, 3> hw{half_width, half_width, half_width};
  std::array<int, 3> nn{n, n, n};
  return box(dim, std::span<const double>(hw.data(), dim), std::span<const int>(nn.data(), dim));
}

Grid Grid::box(int dim, std::span<const double> half_widths, std::span<const int> n) {
  if (dim < 1 || dim > 3) throw ConfigError("grid dimension must be 1, 2 or 3");
  if (static_cast<int>(half_widths.size()) != dim || static_cast<int>(n.size()) != dim) {
    throw ConfigError("grid extents do not match the dimension");
  }
  Grid g;
  g.dim_ = dim;
  g.size_ = 1;
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 3 || n[a] % 2 == 0) throw ConfigError("node count per axis must be odd and >= 3");
    if (!(half_widths[a] > 0.0)) throw ConfigError("grid half-width must be positive");
    const double h = 2.0 * half_widths[a] / (n[a] - 1);
    if (a == 0) {
      g.h_ = h;
    } else if (std::abs(h - g.h_) > 1e-12 * g.h_) {
      throw ConfigError("grid spacing differs between axes (" + std::to_string(g.h_) + " vs " +
                        std::to_string(h) + ")");
    }
    g.n_[a] = n[a];
    g.half_width_[a] = half_widths[a];
    g.stride_[a] = g.size_;
    g.size_ *= static_cast<std::size_t>(n[a]);
  }
  return g;
}

double Grid::max_half_width() const {
  return *std::max_element(half_width_.begin(), half_width_.begin() + dim_);
}

std::array<int, 3> Grid::multi_index(std::size_t idx) const {
  std::array<int, 3> i{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    i[a] = static_cast<int>(idx % n_[a]);
    idx /= n_[a];
  }
  return i;
}

std::size_t Grid::linear_index(const std::array<int, 3>& i) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) idx += static_cast<std::size_t>(i[a]) * stride_[a];
  return idx;
}

std::array<double, 3> Grid::coords(std::size_t idx) const {
  const auto i = multi_index(idx);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = -half_width_[a] + i[a] * h_;
  return x;
}

bool Grid::on_boundary(std::size_t idx) const {
  const auto i = multi_index(idx);
  for (int a = 0; a < dim_; ++a) {
    if (i[a] == 0 || i[a] == n_[a] - 1) return true;
  }
  return false;
}

bool Grid::same_layout(const Grid& other) const {
  if (dim_ != other.dim_ || h_ != other.h_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (n_[a] != other.n_[a] || half_width_[a] != other.half_width_[a]) return false;
  }
  return true;
}

namespace {

template <typename Value>
NodeDerivatives differences(const Grid& grid, std::size_t idx, Value&& u) {
  const int d = grid.dim();
  const double h = grid.h();
  const double inv2h = 0.5 / h;
  const double invh2 = 1.0 / (h * h);
  const double inv4h2 = 0.25 * invh2;
  NodeDerivatives out{SmallVector(d), SmallMatrix(d, d)};
  const double u0 = u(idx);
  for (int a = 0; a < d; ++a) {
    const std::size_t sa = grid.stride(a);
    const double up = u(idx + sa);
    const double um = u(idx - sa);
    out.gradient[a] = (up - um) * inv2h;
    out.hessian(a, a) = (up - 2.0 * u0 + um) * invh2;
    for (int b = a + 1; b < d; ++b) {
      const std::size_t sb = grid.stride(b);
      const double cross =
          (u(idx + sa + sb) - u(idx + sa - sb) - u(idx - sa + sb) + u(idx - sa - sb)) * inv4h2;
      out.hessian(a, b) = cross;
      out.hessian(b, a) = cross;
    }
  }
  return out;
}

}  // namespace

NodeDerivatives central_derivatives(const Grid& grid, std::span<const double> u,
                                    std::size_t idx) {
  return differences(grid, idx, [&](std::size_t j) { return u[j]; });
}

double reciprocal_shift(std::span<const double> u) {
  double lo = 0.0;
  for (double v : u)
    if (std::isfinite(v)) lo = std::min(lo, v);
  return 1.0 - lo;
}

NodeDerivatives graph_derivatives(const Grid& grid, std::span<const double> u, std::size_t idx,
                                  double shift) {
  NodeDerivatives dv = differences(grid, idx, [&](std::size_t j) { return 1.0 / (u[j] + shift); });
  const double v = 1.0 / (u[idx] + shift);
  const double p1 = -1.0 / (v * v);
  const double p2 = 2.0 / (v * v * v);
  NodeDerivatives out;
  out.gradient = p1 * dv.gradient;
  out.hessian = p1 * dv.hessian + p2 * dv.gradient * dv.gradient.transpose();
  return out;
}

bool stencil_clear_of_cap(const FieldState& state, std::size_t idx) {
  const Grid& g = state.grid;
  if (!g.interior(idx)) return false;
  const auto base = g.multi_index(idx);
  const int d = g.dim();
  std::array<int, 3> off{-1, -1, -1};
  for (int a = d; a < 3; ++a) off[a] = 0;
  for (;;) {
    std::array<int, 3> j = base;
    for (int a = 0; a < d; ++a) j[a] += off[a];
    const std::size_t n = g.linear_index(j);
    if (g.on_boundary(n) || state.frozen(n)) return false;
    int a = 0;
    while (a < d && ++off[a] > 1) off[a++] = -1;
    if (a == d) break;
  }
  return true;
}

}  // namespace curveflow
