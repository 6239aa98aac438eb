#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace curveflow {

/// Largest number of principal curvatures handled without heap allocation.
inline constexpr int kMaxDim = 8;

/// Principal curvatures (kappa_1..kappa_d), units 1/length.
using CurvatureVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

/// Open symmetric cone on which a speed function is positive and elliptic.
/// `garding(k)` is {H_1 > 0, ..., H_k > 0}; `half_space` is {sum > 0}, i.e. Gamma_1.
struct ConeSpec {
  enum class Kind { garding, half_space };
  Kind kind = Kind::garding;
  int k = 1;

  static ConeSpec garding(int k) { return {Kind::garding, k}; }
  static ConeSpec half_space() { return {Kind::half_space, 1}; }
  int order() const { return kind == Kind::half_space ? 1 : k; }
};

enum class SpeedFamily { normalized_power, quotient };

/// A built-in admissible speed f(kappa): H_k^{1/k} or (H_k/H_l)^{1/(k-l)}.
struct CurvatureFunctionSpec {
  SpeedFamily family = SpeedFamily::normalized_power;
  int k = 1;
  int l = 0;
  int dim = 2;
  ConeSpec cone = ConeSpec::garding(1);
  /// Relative floor: H_j <= cone_floor * max|kappa|^j counts as outside the cone.
  double cone_floor = 1e-12;

  static CurvatureFunctionSpec mean(int dim);
  static CurvatureFunctionSpec normalized_power(int k, int dim);
  static CurvatureFunctionSpec quotient(int k, int l, int dim);
  static CurvatureFunctionSpec gauss(int dim);

  /// Gauss-type f = H_d^{1/d}; cylinders lie on the boundary of its cone.
  bool is_gauss_type() const { return k == dim && l == 0 && dim > 1; }
  /// Canonical name in the config grammar ("H1", "Hk^1/k:k=2", "quotient:k=2,l=1", "Gauss").
  std::string name() const;
};

/// Parses the speed grammar `H1 | Hk^1/k:k=<int> | quotient:k=<int>,l=<int> | Gauss`.
/// Throws ConfigError on malformed text or indices incompatible with `dim`.
CurvatureFunctionSpec parse_speed(const std::string& text, int dim);

/// H_k = e_k / binomial(d, k); H_0 = 1. Throws ConfigError if k is outside [0, d].
double elementary_symmetric_normalized(const CurvatureVector& lambda, int k);

/// Index j of the first H_j at or below the floor, 0 when lambda is inside the cone.
int first_cone_violation(const CurvatureVector& lambda, const ConeSpec& cone,
                         double floor = 1e-12);

bool cone_contains(const CurvatureVector& lambda, const ConeSpec& cone, double floor = 1e-12);

double eval_f(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda);

CurvatureVector grad_f(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda);

struct SpeedValue {
  double f = 0.0;
  CurvatureVector grad;
};

/// f and its gradient in one pass. Throws DomainError outside the cone.
SpeedValue eval_f_with_grad(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda);

/// Same as eval_f_with_grad but reports the violated index instead of throwing.
/// Returns 0 on success.
int try_eval_f_with_grad(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda,
                         SpeedValue& out);

/// Seeded sampler for cone points: log-uniform magnitudes in [1e-2, 1e2] with random
/// signs, rejected until inside the cone.
class ConeSampler {
 public:
  ConeSampler(int dim, ConeSpec cone, std::uint64_t seed, double floor = 1e-12);
  CurvatureVector next();

 private:
  int dim_;
  ConeSpec cone_;
  double floor_;
  std::mt19937_64 rng_;
};

struct ConditionResult {
  std::string name;
  double worst = 0.0;      // worst observed margin, sign convention per condition
  double tolerance = 0.0;  // pass threshold on `worst`
  bool passed = true;
};

struct PropertyReport {
  std::string speed;
  int dim = 0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<ConditionResult> conditions;
  bool passed() const;
};

/// Samples the cone and checks monotonicity, midpoint concavity, homogeneity,
/// normalization, f <= mean and sum f_i >= 1. Failures are reported, never thrown.
PropertyReport verify_structure_conditions(const CurvatureFunctionSpec& spec, int samples,
                                           std::uint64_t seed);

/// Smallest R on the doubling grid {0, 1, 2, 4, ...} with f(k_1, ..., k_d + R) >= C for
/// every sample. Throws ConditionViolation once R would exceed 1e12.
double large_shift_speed(const CurvatureFunctionSpec& spec,
                         std::span<const CurvatureVector> samples, double C);

}  // namespace curveflow
