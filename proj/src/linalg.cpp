#include "curveflow/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curveflow/errors.hpp"

namespace curveflow {

SymmetricEigen jacobi_eigen(const SmallMatrix& input) {
  const int n = static_cast<int>(input.rows());
  SmallMatrix a = input;
  SmallMatrix v = SmallMatrix::Identity(n, n);
  const double threshold = 1e-14 * a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (!(off_norm() > threshold)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_norm() > threshold) {
    throw NumericalFault("Jacobi eigensolver did not converge in 100 sweeps");
  }
  if (!a.allFinite()) throw NumericalFault("non-finite entries in shape operator");

  std::array<int, kMaxGridDim> order{};
  std::iota(order.begin(), order.begin() + n, 0);
  std::sort(order.begin(), order.begin() + n, [&](int i, int j) { return a(i, i) < a(j, j); });

  SymmetricEigen out{CurvatureVector(n), SmallMatrix(n, n)};
  for (int i = 0; i < n; ++i) {
    out.values[i] = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

}  // namespace curveflow
