#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "curveflow/errors.hpp"
#include "curveflow/graph_geometry.hpp"

using namespace curveflow;

namespace {

SmallMatrix random_symmetric(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  SmallMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = N(rng);
  return a;
}

SmallMatrix rotation2(double th) {
  SmallMatrix r(2, 2);
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return r;
}

FieldState paraboloid(int n, double R) {
  FieldState s;
  s.grid = Grid::cube(2, R, n);
  s.L = 100.0;
  s.u.resize(s.grid.size());
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const auto x = s.grid.coords(i);
    s.u[i] = 0.5 * (x[0] * x[0] + x[1] * x[1]);
  }
  return s;
}

}  // namespace

TEST_CASE("jacobi eigensolver against Eigen") {
  std::mt19937_64 rng(2);
  for (int d = 1; d <= 4; ++d) {
    for (int rep = 0; rep < 50; ++rep) {
      const SmallMatrix a = random_symmetric(d, rng, 3.0);
      const SymmetricEigen e = jacobi_eigen(a);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(Eigen::MatrixXd(a), Eigen::ComputeEigenvectors);
      for (int i = 0; i < d; ++i) CHECK(e.values[i] == doctest::Approx(ref.eigenvalues()[i]).epsilon(1e-11));
      const SmallMatrix rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
      CHECK((rebuilt - a).norm() <= 1e-11 * (1.0 + a.norm()));
      CHECK((e.vectors.transpose() * e.vectors - SmallMatrix::Identity(d, d)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("metric quantities") {
  SmallVector g0 = SmallVector::Zero(2);
  const auto m0 = metric_quantities(g0);
  CHECK(m0.W == 1.0);
  CHECK((m0.gamma - SmallMatrix::Identity(2, 2)).norm() == 0.0);

  SmallVector g(2);
  g << 3, 4;
  const auto m = metric_quantities(g);
  CHECK(m.W == doctest::Approx(std::sqrt(26.0)));
  const SmallMatrix metric = SmallMatrix::Identity(2, 2) + g * g.transpose();
  CHECK((m.gamma * metric * m.gamma - SmallMatrix::Identity(2, 2)).norm() <= 1e-12);
}

TEST_CASE("property: gamma inverts the metric and det gamma = 1/W") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N(0.0, 5.0);
  for (int d = 1; d <= 4; ++d) {
    for (int rep = 0; rep < 30; ++rep) {
      SmallVector g(d);
      for (int i = 0; i < d; ++i) g[i] = N(rng);
      const auto m = metric_quantities(g);
      const SmallMatrix metric = SmallMatrix::Identity(d, d) + g * g.transpose();
      CHECK((m.gamma * metric * m.gamma - SmallMatrix::Identity(d, d)).norm() <= 1e-10);
      CHECK(m.gamma.determinant() == doctest::Approx(1.0 / m.W).epsilon(1e-12));
      CHECK((m.gamma - m.gamma.transpose()).norm() == 0.0);
    }
  }
}

TEST_CASE("shape operator examples") {
  SmallVector g = SmallVector::Zero(2);
  auto s = shape_operator(g, SmallMatrix::Identity(2, 2));
  CHECK(s.kappa[0] == doctest::Approx(1.0));
  CHECK(s.kappa[1] == doctest::Approx(1.0));
  SmallMatrix h(2, 2);
  h << 2, 0, 0, -1;
  s = shape_operator(g, h);
  CHECK(s.kappa[0] == doctest::Approx(-1.0));
  CHECK(s.kappa[1] == doctest::Approx(2.0));
  CHECK(s.nu_vertical == 1.0);
}

TEST_CASE("paraboloid curvatures from the exact derivatives") {
  // u = |x|^2 / 2: radial 1/W^3, angular 1/W
  for (double r : {0.0, 0.3, 1.0, 2.5}) {
    for (double th : {0.0, 0.7, 2.0}) {
      SmallVector g(2);
      g << r * std::cos(th), r * std::sin(th);
      const auto s = shape_operator(g, SmallMatrix::Identity(2, 2));
      const double W = std::sqrt(1 + r * r);
      CHECK(s.kappa[0] == doctest::Approx(1.0 / (W * W * W)).epsilon(1e-13));
      CHECK(s.kappa[1] == doctest::Approx(1.0 / W).epsilon(1e-13));
    }
  }
}

TEST_CASE("property: curvatures are rotation invariant") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N(0.0, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    SmallVector g(2);
    g << N(rng), N(rng);
    const SmallMatrix h = random_symmetric(2, rng, 2.0);
    const SmallMatrix R = rotation2(N(rng));
    const SmallVector rg = R * g;
    const auto a = shape_operator(g, h);
    const auto b = shape_operator(rg, R * h * R.transpose());
    CHECK(a.kappa[0] == doctest::Approx(b.kappa[0]).epsilon(1e-11));
    CHECK(a.kappa[1] == doctest::Approx(b.kappa[1]).epsilon(1e-11));
  }
}

TEST_CASE("speed linearization at a flat umbilic point") {
  const auto spec = CurvatureFunctionSpec::mean(2);
  const auto s = shape_operator(SmallVector::Zero(2), SmallMatrix::Identity(2, 2));
  const auto lin = speed_and_linearization(spec, s);
  CHECK(lin.speed == doctest::Approx(1.0));
  CHECK((lin.dF_dA - 0.5 * SmallMatrix::Identity(2, 2)).norm() <= 1e-14);
  CHECK((lin.C - 0.5 * SmallMatrix::Identity(2, 2)).norm() <= 1e-14);

  const double r = 0.4;
  const auto sphere = shape_operator(SmallVector::Zero(3), SmallMatrix::Identity(3, 3) / r);
  CHECK(speed_and_linearization(CurvatureFunctionSpec::normalized_power(2, 3), sphere).f ==
        doctest::Approx(1.0 / r));
}

TEST_CASE("dF_dA and C agree with finite differences in the matrix entries") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> N(0.0, 1.0);
  for (const auto& spec : {CurvatureFunctionSpec::mean(3), CurvatureFunctionSpec::normalized_power(2, 3),
                           CurvatureFunctionSpec::quotient(2, 1, 3)}) {
    int tested = 0;
    while (tested < 20) {
      SmallVector g(3);
      for (int i = 0; i < 3; ++i) g[i] = N(rng);
      const SmallMatrix h = random_symmetric(3, rng) + 2.5 * SmallMatrix::Identity(3, 3);
      const auto s = shape_operator(g, h);
      if (!cone_contains(s.kappa, spec.cone, 1e-3)) continue;
      ++tested;
      const auto lin = speed_and_linearization(spec, s);
      const double step = 1e-6;
      for (int i = 0; i < 3; ++i) {
        for (int j = i; j < 3; ++j) {
          SmallMatrix e = SmallMatrix::Zero(3, 3);
          e(i, j) += 1.0;
          if (i != j) e(j, i) += 1.0;
          const double factor = i == j ? 1.0 : 2.0;
          // dF_dA through A directly
          const auto sap = shape_operator(SmallVector::Zero(3), s.A + step * e);
          const auto sam = shape_operator(SmallVector::Zero(3), s.A - step * e);
          const double dA = (eval_f(spec, sap.kappa) - eval_f(spec, sam.kappa)) / (2 * step);
          CHECK(std::abs(dA - factor * lin.dF_dA(i, j)) <= 1e-5 * (1.0 + lin.dF_dA.norm()));
          // C through the Hessian
          const double sp = speed_and_linearization(spec, shape_operator(g, h + step * e)).speed;
          const double sm = speed_and_linearization(spec, shape_operator(g, h - step * e)).speed;
          CHECK(std::abs((sp - sm) / (2 * step) - factor * lin.C(i, j)) <= 1e-5 * (1.0 + lin.C.norm()));
        }
      }
    }
  }
}

TEST_CASE("linearization outside the cone throws with the index") {
  SmallMatrix h(2, 2);
  h << -1, 0, 0, -2;
  try {
    speed_and_linearization(CurvatureFunctionSpec::mean(2), shape_operator(SmallVector::Zero(2), h));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.violated_index() == 1);
  }
}

TEST_CASE("central differences are exact on quadratics") {
  const Grid grid = Grid::cube(2, 1.0, 21);
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto x = grid.coords(i);
    u[i] = 1.5 * x[0] * x[0] - 0.7 * x[0] * x[1] + 0.25 * x[1] * x[1] + 2 * x[0] - x[1];
  }
  const std::size_t c = grid.linear_index({13, 7, 0});
  const auto x = grid.coords(c);
  const auto nd = central_derivatives(grid, u, c);
  CHECK(nd.gradient[0] == doctest::Approx(3 * x[0] - 0.7 * x[1] + 2).epsilon(1e-10));
  CHECK(nd.gradient[1] == doctest::Approx(-0.7 * x[0] + 0.5 * x[1] - 1).epsilon(1e-10));
  CHECK(nd.hessian(0, 0) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(nd.hessian(0, 1) == doctest::Approx(-0.7).epsilon(1e-9));
  CHECK(nd.hessian(1, 1) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("grid layout") {
  const Grid g = Grid::cube(3, 1.0, 5);
  CHECK(g.size() == 125);
  CHECK(g.h() == doctest::Approx(0.5));
  CHECK(g.stride(0) == 1);
  CHECK(g.stride(2) == 25);
  const std::size_t idx = g.linear_index({1, 2, 3});
  CHECK(g.multi_index(idx) == std::array<int, 3>{1, 2, 3});
  CHECK(g.coords(idx)[2] == doctest::Approx(0.5));
  CHECK(g.on_boundary(g.linear_index({0, 2, 2})));
  CHECK(g.interior(g.linear_index({1, 2, 3})));
  const double hw[2] = {2.5, 1.5};
  const int n[2] = {11, 7};
  const Grid b = Grid::box(2, hw, n);
  CHECK(b.h() == doctest::Approx(0.5));
  const int bad[2] = {11, 9};
  CHECK_THROWS_AS(Grid::box(2, hw, bad), ConfigError);
  CHECK_THROWS_AS(Grid::cube(2, 1.0, 4), ConfigError);
}

TEST_CASE("admissibility of simple fields") {
  FieldState s = paraboloid(33, 1.0);
  for (const auto& spec : {CurvatureFunctionSpec::mean(2), CurvatureFunctionSpec::gauss(2),
                           CurvatureFunctionSpec::quotient(2, 1, 2)}) {
    const auto rep = admissibility_check(spec, s);
    CHECK(rep.status == AdmissibilityStatus::admissible);
    CHECK(rep.min_f > 0.0);
    CHECK(rep.checked_nodes == 31u * 31u);
  }
  std::fill(s.u.begin(), s.u.end(), 3.0);
  const auto flat = admissibility_check(CurvatureFunctionSpec::mean(2), s);
  CHECK(flat.status == AdmissibilityStatus::violated);
  CHECK_FALSE(flat.violations.empty());
  CHECK(flat.violations.front().violated_index == 1);
}

TEST_CASE("discrete shape operator is exact on the paraboloid") {
  // radial closed form: kappa = (1/W^3, 1/W)
  for (int n : {17, 33, 65}) {
    const FieldState s = paraboloid(n, 2.0);
    double err = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      if (!s.grid.interior(i)) continue;
      const auto x = s.grid.coords(i);
      const double W = std::sqrt(1 + x[0] * x[0] + x[1] * x[1]);
      const auto nd = central_derivatives(s.grid, s.u, i);
      const auto k = shape_operator(nd.gradient, nd.hessian).kappa;
      err = std::max({err, std::abs(k[0] - 1 / (W * W * W)), std::abs(k[1] - 1 / W)});
    }
    CHECK(err <= 1e-10);
  }
}

TEST_CASE("reciprocal differences converge at second order on the paraboloid") {
  std::vector<double> errs;
  for (int n : {65, 129, 257}) {
    const FieldState s = paraboloid(n, 2.0);
    const double shift = reciprocal_shift(s.u);
    CHECK(shift == 1.0);
    double err = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      if (!s.grid.interior(i)) continue;
      const auto x = s.grid.coords(i);
      const double W = std::sqrt(1 + x[0] * x[0] + x[1] * x[1]);
      const auto nd = graph_derivatives(s.grid, s.u, i, shift);
      const auto k = shape_operator(nd.gradient, nd.hessian).kappa;
      err = std::max({err, std::abs(k[0] - 1 / (W * W * W)), std::abs(k[1] - 1 / W)});
    }
    errs.push_back(err);
  }
  CHECK(errs[0] > 1e-8);
  CHECK(std::log2(errs[0] / errs[1]) >= 1.8);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.8);
}

TEST_CASE("reciprocal differences are exact on v-quadratics") {
  // u = 1/q - shift with q quadratic makes v = q
  const Grid g = Grid::cube(2, 1.0, 9);
  std::vector<double> u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = g.coords(i);
    u[i] = 1.0 / (0.5 + 0.1 * x[0] + 0.05 * x[0] * x[1] + 0.2 * x[1] * x[1]) - 3.0;
  }
  const std::size_t i = g.linear_index({4, 4, 0});
  const auto nd = graph_derivatives(g, u, i, 3.0);
  const double v = 0.5;
  CHECK(nd.gradient[0] == doctest::Approx(-0.1 / (v * v)));
  CHECK(nd.gradient[1] == doctest::Approx(0.0));
  CHECK(nd.hessian(0, 0) == doctest::Approx(2 * 0.01 / (v * v * v)));
  CHECK(nd.hessian(0, 1) == doctest::Approx(-0.05 / (v * v)));
  CHECK(nd.hessian(1, 1) == doctest::Approx(-0.4 / (v * v)));
}
