#pragma once

#include <Eigen/Core>

#include "curveflow/curvature_functions.hpp"

namespace curveflow {

/// Largest horizontal dimension of a grid field.
inline constexpr int kMaxGridDim = 4;

using SmallVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxGridDim, 1>;
using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxGridDim,
                                  kMaxGridDim>;

struct SymmetricEigen {
  CurvatureVector values;  // ascending
  SmallMatrix vectors;     // column i belongs to values[i]
};

/// Cyclic Jacobi eigensolver for small symmetric matrices. Stops once the off-diagonal
/// Frobenius norm drops below 1e-14 * ||A||_F; throws NumericalFault after 100 sweeps.
SymmetricEigen jacobi_eigen(const SmallMatrix& a);

}  // namespace curveflow
