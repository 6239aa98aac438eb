#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "curveflow/curvature_functions.hpp"
#include "curveflow/grid.hpp"
#include "curveflow/linalg.hpp"

namespace curveflow {

struct MetricQuantities {
  double W = 1.0;       // sqrt(1 + |Du|^2)
  SmallMatrix gamma;    // symmetric square root of the inverse graph metric
};

/// W and gamma = I - g g^T / (W (1 + W)), so gamma (I + g g^T) gamma = I.
MetricQuantities metric_quantities(const SmallVector& g);

/// Per-point geometry of the graph of u: A = gamma D^2u gamma / W and its eigenvalues.
struct ShapeOperatorSample {
  double W = 1.0;
  SmallMatrix gamma;
  SmallMatrix A;
  CurvatureVector kappa;     // ascending
  SmallMatrix eigenvectors;  // column i belongs to kappa[i]
  double nu_vertical = 1.0;  // 1 / W
};

ShapeOperatorSample shape_operator(const SmallVector& g, const SmallMatrix& hessian);

struct SpeedLinearization {
  double f = 0.0;      // f(kappa)
  double speed = 0.0;  // W f(kappa), the normal velocity lifted to the vertical
  SmallMatrix dF_dA;   // sum_k f_k v_k v_k^T
  SmallMatrix C;       // gamma dF_dA gamma = d(W F) / d(D^2 u)
};

/// Throws DomainError (carrying the violated H_j index) when kappa is outside the cone.
SpeedLinearization speed_and_linearization(const CurvatureFunctionSpec& spec,
                                           const ShapeOperatorSample& s);

enum class AdmissibilityStatus { admissible, weakly_admissible_margin, violated };

std::string to_string(AdmissibilityStatus s);

struct AdmissibilityViolation {
  std::size_t node = 0;
  int violated_index = 0;
  std::vector<double> kappa;
};

struct AdmissibilityReport {
  AdmissibilityStatus status = AdmissibilityStatus::admissible;
  /// Per node: f(kappa) at checked nodes inside the cone, NaN elsewhere.
  std::vector<double> f_values;
  std::vector<AdmissibilityViolation> violations;
  double min_f = 0.0;
  std::size_t checked_nodes = 0;
  /// Cone exits at nodes whose stencil reaches the frozen cap. The blended
  /// cap is only weakly admissible, so these downgrade the status to
  /// weakly_admissible_margin instead of violated.
  std::size_t interface_violations = 0;
};

/// Relative f margin below which an otherwise admissible field is flagged
/// `weakly_admissible_margin`: min f <= margin * max f.
inline constexpr double kWeakAdmissibilityMargin = 1e-8;

/// Cone membership and f at every active node (interior, off the cap).
AdmissibilityReport admissibility_check(const CurvatureFunctionSpec& spec,
                                        const FieldState& field);

}  // namespace curveflow
