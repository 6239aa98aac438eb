#include "doctest.h"

#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "curveflow/curvature_functions.hpp"
#include "curveflow/errors.hpp"

using namespace curveflow;

namespace {

CurvatureVector vec(std::initializer_list<double> xs) {
  CurvatureVector v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// brute force over all k-subsets
double hk_enum(const CurvatureVector& l, int k) {
  const int d = static_cast<int>(l.size());
  double e = 0.0;
  int count = 0;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    if (std::popcount(mask) != k) continue;
    double p = 1.0;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) p *= l[i];
    e += p;
    ++count;
  }
  return e / count;
}

}  // namespace

TEST_CASE("normalized elementary symmetric values") {
  CHECK(elementary_symmetric_normalized(vec({1, 1, 1}), 2) == doctest::Approx(1.0));
  CHECK(elementary_symmetric_normalized(vec({1, 2, 3}), 2) == doctest::Approx(11.0 / 3.0));
  CHECK(elementary_symmetric_normalized(vec({1, 0}), 2) == 0.0);
  CHECK(elementary_symmetric_normalized(vec({4, 5}), 0) == 1.0);
  CHECK_THROWS_AS(elementary_symmetric_normalized(vec({1, 2}), 3), ConfigError);
}

TEST_CASE("H_k agrees with subset enumeration") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int d = 1; d <= 6; ++d) {
    for (int rep = 0; rep < 20; ++rep) {
      CurvatureVector l(d);
      for (int i = 0; i < d; ++i) l[i] = U(rng);
      for (int k = 0; k <= d; ++k) {
        CHECK(elementary_symmetric_normalized(l, k) ==
              doctest::Approx(hk_enum(l, k)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("cone membership") {
  CHECK(cone_contains(vec({1, 1, 1}), ConeSpec::garding(2)));
  CHECK_FALSE(cone_contains(vec({1, 1, -0.5}), ConeSpec::garding(2)));
  CHECK(first_cone_violation(vec({1, 1, -0.5}), ConeSpec::garding(2)) == 2);
  CHECK_FALSE(cone_contains(vec({-1, -1}), ConeSpec::garding(1)));
  CHECK_FALSE(cone_contains(vec({-1, -1}), ConeSpec::half_space()));
  CHECK(cone_contains(vec({3, -1}), ConeSpec::half_space()));
  CHECK_FALSE(cone_contains(vec({0, 0}), ConeSpec::garding(1)));
}

TEST_CASE("speed values") {
  const auto h1 = CurvatureFunctionSpec::mean(3);
  CHECK(eval_f(h1, vec({0.7, 0.7, 0.7})) == doctest::Approx(0.7));
  CHECK(eval_f(CurvatureFunctionSpec::quotient(2, 1, 3), vec({1, 2, 3})) ==
        doctest::Approx(11.0 / 6.0));
  CHECK(eval_f(CurvatureFunctionSpec::normalized_power(2, 3), vec({1, 2, 3})) ==
        doctest::Approx(std::sqrt(11.0 / 3.0)));
  CHECK(eval_f(CurvatureFunctionSpec::gauss(2), vec({4, 1})) == doctest::Approx(2.0));
}

TEST_CASE("outside the cone is a domain error with the index") {
  const auto h2 = CurvatureFunctionSpec::normalized_power(2, 3);
  try {
    eval_f(h2, vec({1, 1, -0.9}));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.violated_index() == 2);
  }
  CHECK_THROWS_AS(eval_f(CurvatureFunctionSpec::mean(2), vec({-1, 0.5})), DomainError);
  SpeedValue v;
  CHECK(try_eval_f_with_grad(h2, vec({-1, -1, -1}), v) == 1);
}

TEST_CASE("gradients") {
  const auto g1 = grad_f(CurvatureFunctionSpec::mean(4), vec({1, -0.5, 2, 3}));
  for (int i = 0; i < 4; ++i) CHECK(g1[i] == doctest::Approx(0.25));
  const auto g2 = grad_f(CurvatureFunctionSpec::normalized_power(2, 3), vec({1, 1, 1}));
  for (int i = 0; i < 3; ++i) CHECK(g2[i] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("gradient matches central differences") {
  const std::vector<CurvatureFunctionSpec> specs = {
      CurvatureFunctionSpec::mean(3), CurvatureFunctionSpec::normalized_power(2, 3),
      CurvatureFunctionSpec::quotient(2, 1, 3), CurvatureFunctionSpec::quotient(3, 1, 4),
      CurvatureFunctionSpec::gauss(3)};
  for (const auto& spec : specs) {
    ConeSampler sampler(spec.dim, spec.cone, 11);
    for (int s = 0; s < 50; ++s) {
      const CurvatureVector l = sampler.next();
      const CurvatureVector g = grad_f(spec, l);
      for (int i = 0; i < spec.dim; ++i) {
        const double step = 1e-5 * std::max(1.0, std::abs(l[i]));
        CurvatureVector p = l, m = l;
        p[i] += step;
        m[i] -= step;
        if (!cone_contains(p, spec.cone) || !cone_contains(m, spec.cone)) continue;
        const double fd = (eval_f(spec, p) - eval_f(spec, m)) / (2 * step);
        CHECK(std::abs(fd - g[i]) <= 1e-6 * g.norm());
      }
    }
  }
}

TEST_CASE("speed grammar") {
  CHECK(parse_speed("H1", 3).name() == "H1");
  CHECK(parse_speed("Hk^1/k:k=2", 3).k == 2);
  const auto q = parse_speed("quotient:k=3,l=1", 4);
  CHECK(q.family == SpeedFamily::quotient);
  CHECK(q.k == 3);
  CHECK(q.l == 1);
  CHECK(parse_speed("Gauss", 3).is_gauss_type());
  CHECK_THROWS_AS(parse_speed("H7", 2), ConfigError);
  CHECK_THROWS_AS(parse_speed("Hk^1/k:k=3", 2), ConfigError);
  CHECK_THROWS_AS(parse_speed("quotient:k=1,l=2", 3), ConfigError);
  CHECK(parse_speed(parse_speed("quotient:k=2,l=1", 3).name(), 3).name() == "quotient:k=2,l=1");
}

TEST_CASE("structure conditions hold for the built-in speeds") {
  for (int d : {2, 3}) {
    for (const auto& spec : {CurvatureFunctionSpec::mean(d), CurvatureFunctionSpec::normalized_power(2, d),
                             CurvatureFunctionSpec::quotient(2, 1, d)}) {
      const PropertyReport rep = verify_structure_conditions(spec, 1000, 7);
      for (const auto& c : rep.conditions) {
        INFO(spec.name() << " d=" << d << " " << c.name << " worst=" << c.worst);
        CHECK(c.passed);
      }
      CHECK(rep.passed());
    }
  }
}

TEST_CASE("mean curvature has exactly unit gradient sum") {
  ConeSampler sampler(3, ConeSpec::garding(1), 5);
  for (int s = 0; s < 200; ++s) {
    const auto g = grad_f(CurvatureFunctionSpec::mean(3), sampler.next());
    CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("property: concavity along segments and homogeneity") {
  const auto q = CurvatureFunctionSpec::quotient(2, 1, 2);
  const auto l = vec({1, 1}), m = vec({3, 1});
  const CurvatureVector mid = 0.5 * (l + m);
  CHECK(eval_f(q, mid) - 0.5 * (eval_f(q, l) + eval_f(q, m)) >= 0.0);

  ConeSampler sampler(3, ConeSpec::garding(2), 9);
  const auto h2 = CurvatureFunctionSpec::normalized_power(2, 3);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  for (int s = 0; s < 200; ++s) {
    const CurvatureVector a = sampler.next();
    const CurvatureVector b = sampler.next();
    const double t = U(rng) / 10.0;
    const CurvatureVector c = t * a + (1 - t) * b;
    CHECK(eval_f(h2, c) >= t * eval_f(h2, a) + (1 - t) * eval_f(h2, b) - 1e-9);
    const double lam = U(rng);
    CHECK(eval_f(h2, lam * a) == doctest::Approx(lam * eval_f(h2, a)).epsilon(1e-12));
    // symmetric in its arguments
    CurvatureVector p = a;
    std::swap(p[0], p[2]);
    CHECK(eval_f(h2, p) == doctest::Approx(eval_f(h2, a)).epsilon(1e-13));
  }
}

TEST_CASE("sampler is seeded and stays in the cone") {
  ConeSampler a(3, ConeSpec::garding(3), 42), b(3, ConeSpec::garding(3), 42);
  for (int s = 0; s < 100; ++s) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(cone_contains(x, ConeSpec::garding(3)));
  }
}

TEST_CASE("large shift speed") {
  const std::vector<CurvatureVector> s = {vec({1, 1})};
  const double R = large_shift_speed(CurvatureFunctionSpec::mean(2), s, 10.0);
  CHECK(R >= 18.0);
  CHECK(R <= 32.0);
  CHECK(large_shift_speed(CurvatureFunctionSpec::mean(2), s, 0.5) == 0.0);
  const double R2 = large_shift_speed(CurvatureFunctionSpec::normalized_power(2, 2), s, 2.0);
  CHECK(std::isfinite(R2));
  CHECK(std::sqrt(1.0 + R2) >= 2.0);
  // shifting one entry only grows f like R^{1/3}
  const std::vector<CurvatureVector> s3 = {vec({1, 1, 1})};
  CHECK_THROWS_AS(large_shift_speed(CurvatureFunctionSpec::normalized_power(3, 3), s3, 1e9),
                  ConditionViolation);
}
