#include "curveflow/graph_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curveflow/errors.hpp"

namespace curveflow {

MetricQuantities metric_quantities(const SmallVector& g) {
  const int d = static_cast<int>(g.size());
  MetricQuantities m;
  m.W = std::sqrt(1.0 + g.squaredNorm());
  m.gamma = SmallMatrix::Identity(d, d) - (g * g.transpose()) / (m.W * (1.0 + m.W));
  return m;
}

ShapeOperatorSample shape_operator(const SmallVector& g, const SmallMatrix& hessian) {
  ShapeOperatorSample s;
  const MetricQuantities m = metric_quantities(g);
  s.W = m.W;
  s.gamma = m.gamma;
  s.A = (m.gamma * hessian * m.gamma) / m.W;
  // symmetrize away rounding so the eigensolver sees an exactly symmetric matrix
  s.A = 0.5 * (s.A + s.A.transpose()).eval();
  SymmetricEigen eig = jacobi_eigen(s.A);
  s.kappa = std::move(eig.values);
  s.eigenvectors = std::move(eig.vectors);
  s.nu_vertical = 1.0 / m.W;
  return s;
}

SpeedLinearization speed_and_linearization(const CurvatureFunctionSpec& spec,
                                           const ShapeOperatorSample& s) {
  const SpeedValue v = eval_f_with_grad(spec, s.kappa);
  const int d = static_cast<int>(s.kappa.size());
  SpeedLinearization out;
  out.f = v.f;
  out.speed = s.W * v.f;
  out.dF_dA = SmallMatrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    out.dF_dA += v.grad[k] * s.eigenvectors.col(k) * s.eigenvectors.col(k).transpose();
  }
  out.C = s.gamma * out.dF_dA * s.gamma;
  return out;
}

std::string to_string(AdmissibilityStatus s) {
  switch (s) {
    case AdmissibilityStatus::admissible:
      return "admissible";
    case AdmissibilityStatus::weakly_admissible_margin:
      return "weakly_admissible_margin";
    case AdmissibilityStatus::violated:
      return "violated";
  }
  return "unknown";
}

AdmissibilityReport admissibility_check(const CurvatureFunctionSpec& spec,
                                        const FieldState& field) {
  const Grid& grid = field.grid;
  AdmissibilityReport report;
  report.f_values.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  double min_f = std::numeric_limits<double>::infinity();
  double max_f = 0.0;
  SpeedValue v;
  const double shift = reciprocal_shift(field.u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!field.active(i)) continue;
    ++report.checked_nodes;
    const NodeDerivatives nd = graph_derivatives(grid, field.u, i, shift);
    const ShapeOperatorSample s = shape_operator(nd.gradient, nd.hessian);
    if (int j = try_eval_f_with_grad(spec, s.kappa, v); j != 0) {
      if (!stencil_clear_of_cap(field, i)) {
        ++report.interface_violations;
        continue;
      }
      report.violations.push_back(
          {i, j, std::vector<double>(s.kappa.data(), s.kappa.data() + s.kappa.size())});
      continue;
    }
    report.f_values[i] = v.f;
    min_f = std::min(min_f, v.f);
    max_f = std::max(max_f, v.f);
  }
  const std::size_t outside = report.violations.size() + report.interface_violations;
  report.min_f = report.checked_nodes == outside ? 0.0 : min_f;
  if (!report.violations.empty()) {
    report.status = AdmissibilityStatus::violated;
  } else if (report.interface_violations > 0 ||
             (report.checked_nodes > 0 && min_f <= kWeakAdmissibilityMargin * max_f)) {
    report.status = AdmissibilityStatus::weakly_admissible_margin;
  }
  return report;
}

}  // namespace curveflow
