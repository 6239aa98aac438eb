#include "curveflow/radial_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
void solve_tridiagonal(const std::vector<double>& lower, std::vector<double> diag,
                       const std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace

CurvatureVector radial_curvatures(double u_r, double u_rr, double r, int dim) {
  if (r < 0.0) throw ConfigError("radial curvature needs r >= 0");
  if (dim < 1 || dim > kMaxDim) throw ConfigError("dimension out of range");
  const double W = std::sqrt(1.0 + u_r * u_r);
  CurvatureVector k(dim);
  k[0] = u_rr / (W * W * W);
  const double ang = r > 0.0 ? u_r / (r * W) : k[0];
  for (int j = 1; j < dim; ++j) k[j] = ang;
  return k;
}

double RadialRunResult::value_at(std::size_t k, double r) const {
  const auto& u = snapshots.at(k).u;
  const double s = std::clamp(r / dr, 0.0, static_cast<double>(u.size() - 1));
  const std::size_t i = std::min(static_cast<std::size_t>(s), u.size() - 2);
  const double w = s - static_cast<double>(i);
  return (1.0 - w) * u[i] + w * u[i + 1];
}

RadialRunResult radial_run(const std::function<double(double)>& profile, double L,
                           const CurvatureFunctionSpec& spec, const StepperConfig& cfg,
                           const RadialOptions& opts) {
  cfg.validate();
  if (opts.nodes < 3) throw ConfigError("radial oracle needs at least 3 nodes");
  if (!(opts.radius > 0.0)) throw ConfigError("radial domain radius must be positive");
  const int n = opts.nodes;
  const int dim = spec.dim;
  const double dr = opts.radius / (n - 1);
  const double eps = cutoff_width(cfg, L);
  const double cap_margin = 0.25 * eps;
  const double band = L - eps;

  RadialRunResult result;
  result.dim = dim;
  result.dr = dr;
  result.L = L;

  const double edge = profile(opts.radius);
  if (std::isfinite(edge) && edge < L + 1.0) {
    std::ostringstream os;
    os << "radial initial data " << edge << " < L+1 = " << L + 1.0 << " at r=" << opts.radius;
    throw ConfigError(os.str());
  }

  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    const double v = profile(i * dr);
    u[i] = std::isfinite(v) ? v : kInf;
  }
  for (int p = 0; p < cfg.smoothing_passes; ++p) {
    std::vector<double> s = u;
    for (int i = 0; i < n - 1; ++i) {
      const double left = i == 0 ? u[1] : u[i - 1];
      s[i] = 0.25 * (left + 2.0 * u[i] + u[i + 1]);
    }
    u.swap(s);
  }
  for (int i = 0; i < n; ++i) {
    u[i] = std::isfinite(u[i]) ? min_eps_cutoff(u[i], L, eps, cfg.blend) : L;
    if (i == n - 1 || u[i] >= L - cap_margin) u[i] = L;
  }

  double t = 0.0;
  auto record = [&] { result.snapshots.push_back({t, u, false}); };
  auto min_u = [&] { return *std::min_element(u.begin(), u.end()); };
  record();
  if (min_u() >= L - cfg.escape_gap) {
    result.stop_reason = StopReason::escaped;
    result.escape_time = t;
    return result;
  }

  std::vector<double> lower(n), diag(n), upper(n), rhs(n);
  std::vector<double> a(n), b(n);
  std::vector<char> upwind(n);
  SpeedValue v;
  long next_index = 1;
  const double t_end = cfg.t_end;

  while (t < t_end) {
    const double target = std::min(next_index * cfg.snapshot_every, t_end);
    double dt_front = kInf;
    double dt_vert = kInf;
    for (int i = 0; i < n - 1; ++i) {
      if (u[i] >= L - cap_margin) continue;
      CurvatureVector kappa;
      double W = 1.0;
      const double r = i * dr;
      if (i == 0) {
        const double q = 2.0 * (u[1] - u[0]) / (dr * dr);
        kappa = radial_curvatures(0.0, q, 0.0, dim);
      } else {
        const double p = (u[i + 1] - u[i - 1]) / (2.0 * dr);
        const double q = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dr * dr);
        W = std::sqrt(1.0 + p * p);
        kappa = radial_curvatures(p, q, r, dim);
      }
      if (int j = try_eval_f_with_grad(spec, kappa, v); j != 0) {
        std::ostringstream os;
        os << "radial admissibility lost at r=" << r << ", t=" << t << " (H_" << j << " <= 0)";
        throw AdmissibilityError(os.str(), static_cast<std::size_t>(i),
                                 std::vector<double>(kappa.data(), kappa.data() + kappa.size()));
      }
      if (!std::isfinite(v.f)) throw NumericalFault("non-finite radial speed");
      if (i == 0) {
        a[i] = v.grad.sum();  // every curvature equals u_rr on the axis
        b[i] = 0.0;
        upwind[i] = 0;
      } else {
        double ang = 0.0;
        for (int j = 1; j < dim; ++j) ang += v.grad[j];
        a[i] = v.grad[0] / (W * W);
        b[i] = ang / r;
        upwind[i] = b[i] * dr > 2.0 * a[i];
      }
      if (upwind[i]) {
        dt_front = std::min(dt_front, opts.front_cfl * dr / b[i]);
      } else {
        dt_vert = std::min(dt_vert, opts.du_max / std::max(W * v.f, 1e-300));
      }
    }
    const double dt_stable = std::min({opts.dt_max, dt_front, dt_vert});
    if (dt_stable < cfg.dt_min) {
      result.stop_reason = StopReason::stiffness;
      if (result.snapshots.back().t != t) record();
      return result;
    }
    const double dt = std::min(dt_stable, target - t);

    for (int i = 0; i < n; ++i) {
      lower[i] = upper[i] = 0.0;
      diag[i] = 1.0;
      rhs[i] = u[i];
      if (i == n - 1 || u[i] >= L - cap_margin) {
        rhs[i] = L;
        continue;
      }
      if (i == 0) {
        const double c = dt * a[0] * 2.0 / (dr * dr);
        diag[0] += c;
        upper[0] = -c;
        continue;
      }
      const double da = dt * a[i] / (dr * dr);
      diag[i] += 2.0 * da;
      lower[i] -= da;
      upper[i] -= da;
      if (upwind[i]) {
        const double db = dt * b[i] / dr;
        diag[i] += db;
        upper[i] -= db;
      } else {
        const double db = dt * b[i] / (2.0 * dr);
        upper[i] -= db;
        lower[i] += db;
      }
    }
    solve_tridiagonal(lower, diag, upper, rhs);

    double lowest = kInf;
    for (int i = 0; i < n; ++i) {
      double val = rhs[i];
      if (!std::isfinite(val)) throw NumericalFault("non-finite radial state");
      if (val >= L - cap_margin) val = L;
      if (u[i] < band) result.worst_descent = std::min(result.worst_descent, val - u[i]);
      u[i] = val;
      lowest = std::min(lowest, val);
    }
    t += dt;
    ++result.steps;
    bool at_snapshot = false;
    if (t >= target - 1e-12 * std::max(1.0, target)) {
      t = target;
      ++next_index;
      at_snapshot = true;
    }
    result.u_min.emplace_back(t, lowest);
    const bool gone = lowest >= L - cfg.escape_gap;
    if (at_snapshot || gone) record();
    if (gone) {
      result.stop_reason = StopReason::escaped;
      result.escape_time = t;
      return result;
    }
  }
  result.stop_reason = StopReason::reached_t_end;
  return result;
}

namespace {

double cylinder_speed(const CurvatureFunctionSpec& spec) {
  CurvatureVector cyl = CurvatureVector::Ones(spec.dim);
  cyl[spec.dim - 1] = 0.0;
  if (int j = first_cone_violation(cyl, spec.cone, spec.cone_floor); j != 0) {
    throw DomainError("cylinder curvatures (1, ..., 1, 0) lie outside the cone of " +
                          spec.name(),
                      j);
  }
  return eval_f(spec, cyl);
}

}  // namespace

double cylinder_extinction_time(double rho0, const CurvatureFunctionSpec& spec) {
  if (!(rho0 > 0.0)) throw ConfigError("cylinder radius must be positive");
  return rho0 * rho0 / (2.0 * cylinder_speed(spec));
}

double cylinder_radius(double rho0, double t, const CurvatureFunctionSpec& spec) {
  const double T = cylinder_extinction_time(rho0, spec);
  if (t > T) {
    throw ExtinctionError("cylinder extinct at T=" + std::to_string(T) + ", queried t=" +
                          std::to_string(t));
  }
  if (t < 0.0) throw ConfigError("cylinder radius needs t >= 0");
  return std::sqrt(std::max(0.0, rho0 * rho0 - 2.0 * cylinder_speed(spec) * t));
}

double sphere_speed_check(double r, const CurvatureFunctionSpec& spec) {
  if (!(r > 0.0)) throw ConfigError("sphere radius must be positive");
  const double f = eval_f(spec, CurvatureVector::Constant(spec.dim, 1.0 / r));
  if (std::abs(f * r - 1.0) > 1e-12) {
    throw ConditionViolation("f(1/r, ..., 1/r) = " + std::to_string(f) + " differs from 1/r");
  }
  return f;
}

}  // namespace curveflow
