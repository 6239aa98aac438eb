#include "curveflow/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::infinity();

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double s = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  return std::hypot(px - (ax + s * dx), py - (ay + s * dy));
}

}  // namespace

double ball_radial_profile(double r, double rho) {
  if (r >= rho) return kUndefined;
  return 1.0 / (rho - r) + r * r;
}

double ball_initial_value(std::span<const double> x, double rho) {
  double r2 = 0.0;
  for (double xi : x) r2 += xi * xi;
  return ball_radial_profile(std::sqrt(r2), rho);
}

void Dumbbell::validate() const {
  if (!(w > 0.0)) throw ConfigError("dumbbell neck half-width must be positive (disconnected set)");
  if (!(w < a)) throw ConfigError("dumbbell neck must be narrower than the lobes (w < a)");
  if (!(a < c)) throw ConfigError("dumbbell lobes must be separated (a < c)");
}

double Dumbbell::inside_distance(double x, double y) const {
  const bool in_disc = std::hypot(x - c, y) < a || std::hypot(x + c, y) < a;
  const bool in_neck = std::abs(x) <= c && std::abs(y) < w;
  if (!in_disc && !in_neck) return -1.0;

  double best = std::numeric_limits<double>::infinity();
  // Circle arcs, minus the part facing the neck (|angle - pi| < asin(w/a) seen from the
  // right lobe, mirrored for the left lobe).
  const double half_gap = std::asin(w / a);
  for (int side : {-1, 1}) {
    const double cx = side * c;
    const double px = side * (x - cx);  // reflect so the neck always lies at angle pi
    const double py = y;
    const double theta = std::atan2(py, px);
    const double from_neck = std::numbers::pi - std::abs(theta);
    if (from_neck >= half_gap) {
      best = std::min(best, std::abs(std::hypot(px, py) - a));
    } else {
      const double ex = -a * std::cos(half_gap);
      const double ey = a * std::sin(half_gap);
      best = std::min(best, std::hypot(px - ex, py - ey));
      best = std::min(best, std::hypot(px - ex, py + ey));
    }
  }
  // Straight neck edges between the lobes.
  const double x_end = c - a * std::cos(half_gap);
  for (double ey : {-w, w}) {
    best = std::min(best, segment_distance(x, y, -x_end, ey, x_end, ey));
  }
  return best;
}

double dumbbell_initial_value(std::span<const double> x, const Dumbbell& db) {
  const double dist = db.inside_distance(x[0], x[1]);
  if (dist <= 0.0) return kUndefined;
  return 1.0 / dist + x[0] * x[0] + x[1] * x[1];
}

std::vector<double> sample_ball(const Grid& grid, double rho) {
  if (!(rho > 0.0)) throw ConfigError("ball radius must be positive");
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.coords(i);
    u[i] = ball_initial_value(std::span<const double>(x.data(), grid.dim()), rho);
  }
  return u;
}

std::vector<double> sample_dumbbell(const Grid& grid, const Dumbbell& db) {
  db.validate();
  if (grid.dim() != 2) throw ConfigError("the dumbbell scenario is planar (dimension 2)");
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.coords(i);
    u[i] = dumbbell_initial_value(std::span<const double>(x.data(), 2), db);
  }
  return u;
}

std::vector<double> read_nodal_csv(const Grid& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open initial data file " + path);
  std::vector<double> u(grid.size(), kUndefined);
  std::string line;
  int line_no = 0;
  const int d = grid.dim();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed value '" + cell + "'");
      }
    }
    if (static_cast<int>(values.size()) != d + 1) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(d + 1) + " columns");
    }
    std::array<int, 3> idx{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      const double s = (values[a] + grid.half_width(a)) / grid.h();
      const long k = std::lround(s);
      if (std::abs(s - k) > 1e-6 || k < 0 || k >= grid.n(a)) {
        throw ConfigError(path + ":" + std::to_string(line_no) + ": coordinate off the grid");
      }
      idx[a] = static_cast<int>(k);
    }
    const double v = values[d];
    u[grid.linear_index(idx)] = std::isfinite(v) ? v : kUndefined;
  }
  return u;
}

}  // namespace curveflow
