#include "curveflow/curvature_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <regex>

#include "curveflow/errors.hpp"

namespace curveflow {

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// e_0..e_kmax of lambda, optionally skipping one entry. Extended precision: near the cone
// boundary e_k cancels badly.
void elementary_symmetric(const CurvatureVector& lambda, int kmax, int skip, long double* e) {
  e[0] = 1.0L;
  for (int j = 1; j <= kmax; ++j) e[j] = 0.0L;
  const int d = static_cast<int>(lambda.size());
  for (int i = 0; i < d; ++i) {
    if (i == skip) continue;
    for (int j = kmax; j >= 1; --j) e[j] += static_cast<long double>(lambda[i]) * e[j - 1];
  }
}

double root(long double ratio, int order) {
  if (order == 1) return static_cast<double>(ratio);
  if (order == 2) return static_cast<double>(std::sqrt(ratio));
  return static_cast<double>(std::pow(ratio, 1.0L / order));
}

void check_dim(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda) {
  if (lambda.size() != spec.dim) {
    throw ConfigError("curvature vector has " + std::to_string(lambda.size()) +
                      " entries, speed expects " + std::to_string(spec.dim));
  }
}

}  // namespace

CurvatureFunctionSpec CurvatureFunctionSpec::mean(int dim) { return normalized_power(1, dim); }

CurvatureFunctionSpec CurvatureFunctionSpec::normalized_power(int k, int dim) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("dimension out of range");
  if (k < 1 || k > dim) throw ConfigError("normalized power needs 1 <= k <= d");
  return {SpeedFamily::normalized_power, k, 0, dim, ConeSpec::garding(k)};
}

CurvatureFunctionSpec CurvatureFunctionSpec::quotient(int k, int l, int dim) {
  if (dim < 1 || dim > kMaxDim) throw ConfigError("dimension out of range");
  if (l < 0 || l >= k || k > dim) throw ConfigError("quotient needs 0 <= l < k <= d");
  if (l == 0) return normalized_power(k, dim);
  return {SpeedFamily::quotient, k, l, dim, ConeSpec::garding(k)};
}

CurvatureFunctionSpec CurvatureFunctionSpec::gauss(int dim) { return normalized_power(dim, dim); }

std::string CurvatureFunctionSpec::name() const {
  if (family == SpeedFamily::quotient) {
    return "quotient:k=" + std::to_string(k) + ",l=" + std::to_string(l);
  }
  if (k == 1) return "H1";
  if (is_gauss_type()) return "Gauss";
  return "Hk^1/k:k=" + std::to_string(k);
}

CurvatureFunctionSpec parse_speed(const std::string& text, int dim) {
  static const std::regex power_re(R"(Hk\^1/k:k=(\d+))");
  static const std::regex quotient_re(R"(quotient:k=(\d+),l=(\d+))");
  std::smatch m;
  if (text == "H1") return CurvatureFunctionSpec::mean(dim);
  if (text == "Gauss") return CurvatureFunctionSpec::gauss(dim);
  if (std::regex_match(text, m, power_re)) {
    return CurvatureFunctionSpec::normalized_power(std::stoi(m[1]), dim);
  }
  if (std::regex_match(text, m, quotient_re)) {
    return CurvatureFunctionSpec::quotient(std::stoi(m[1]), std::stoi(m[2]), dim);
  }
  throw ConfigError("unknown speed '" + text +
                    "' (expected H1 | Hk^1/k:k=<int> | quotient:k=<int>,l=<int> | Gauss)");
}

double elementary_symmetric_normalized(const CurvatureVector& lambda, int k) {
  const int d = static_cast<int>(lambda.size());
  if (k < 0 || k > d) {
    throw ConfigError("elementary symmetric index " + std::to_string(k) + " outside [0, " +
                      std::to_string(d) + "]");
  }
  std::array<long double, kMaxDim + 1> e{};
  elementary_symmetric(lambda, k, -1, e.data());
  return static_cast<double>(e[k] / binomial(d, k));
}

int first_cone_violation(const CurvatureVector& lambda, const ConeSpec& cone, double floor) {
  const int d = static_cast<int>(lambda.size());
  const int order = std::min(cone.order(), d);
  const double scale = lambda.cwiseAbs().maxCoeff();
  std::array<long double, kMaxDim + 1> e{};
  elementary_symmetric(lambda, order, -1, e.data());
  double scale_j = 1.0;
  for (int j = 1; j <= order; ++j) {
    scale_j *= scale;
    const double h = static_cast<double>(e[j] / binomial(d, j));
    if (!(h > floor * scale_j)) return j;
  }
  return 0;
}

bool cone_contains(const CurvatureVector& lambda, const ConeSpec& cone, double floor) {
  return first_cone_violation(lambda, cone, floor) == 0;
}

int try_eval_f_with_grad(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda,
                         SpeedValue& out) {
  const int d = static_cast<int>(lambda.size());
  if (int j = first_cone_violation(lambda, spec.cone, spec.cone_floor); j != 0) return j;
  out.grad.resize(d);

  if (spec.k == 1) {
    long double sum = 0.0L;
    for (int i = 0; i < d; ++i) sum += lambda[i];
    out.f = static_cast<double>(sum / d);
    out.grad.setConstant(1.0 / d);
    return 0;
  }

  std::array<long double, kMaxDim + 1> e{};
  std::array<long double, kMaxDim + 1> e_skip{};
  elementary_symmetric(lambda, spec.k, -1, e.data());
  const double bk = binomial(d, spec.k);
  const double bl = binomial(d, spec.l);
  const long double hk = e[spec.k] / bk;
  const long double hl = e[spec.l] / bl;
  const int order = spec.k - spec.l;
  out.f = root(hk / hl, order);
  for (int i = 0; i < d; ++i) {
    elementary_symmetric(lambda, spec.k - 1, i, e_skip.data());
    const long double dhk = e_skip[spec.k - 1] / bk;
    const long double dhl = spec.l > 0 ? e_skip[spec.l - 1] / bl : 0.0L;
    out.grad[i] = static_cast<double>(out.f / order * (dhk / hk - dhl / hl));
  }
  return 0;
}

SpeedValue eval_f_with_grad(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda) {
  check_dim(spec, lambda);
  SpeedValue out;
  if (int j = try_eval_f_with_grad(spec, lambda, out); j != 0) {
    throw DomainError("curvature vector outside the cone of " + spec.name() + ": H_" +
                          std::to_string(j) + " is not positive",
                      j);
  }
  return out;
}

double eval_f(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda) {
  check_dim(spec, lambda);
  if (int j = first_cone_violation(lambda, spec.cone, spec.cone_floor); j != 0) {
    throw DomainError("curvature vector outside the cone of " + spec.name() + ": H_" +
                          std::to_string(j) + " is not positive",
                      j);
  }
  const int d = spec.dim;
  std::array<long double, kMaxDim + 1> e{};
  elementary_symmetric(lambda, spec.k, -1, e.data());
  const long double hk = e[spec.k] / binomial(d, spec.k);
  const long double hl = e[spec.l] / binomial(d, spec.l);
  return root(hk / hl, spec.k - spec.l);
}

CurvatureVector grad_f(const CurvatureFunctionSpec& spec, const CurvatureVector& lambda) {
  return eval_f_with_grad(spec, lambda).grad;
}

ConeSampler::ConeSampler(int dim, ConeSpec cone, std::uint64_t seed, double floor)
    : dim_(dim), cone_(cone), floor_(floor), rng_(seed) {}

CurvatureVector ConeSampler::next() {
  std::uniform_real_distribution<double> log_mag(std::log(1e-2), std::log(1e2));
  std::bernoulli_distribution negative(0.5);
  CurvatureVector v(dim_);
  for (;;) {
    for (int i = 0; i < dim_; ++i) {
      const double m = std::exp(log_mag(rng_));
      v[i] = negative(rng_) ? -m : m;
    }
    if (cone_contains(v, cone_, floor_)) return v;
  }
}

bool PropertyReport::passed() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.passed; });
}

PropertyReport verify_structure_conditions(const CurvatureFunctionSpec& spec, int samples,
                                           std::uint64_t seed) {
  if (samples < 1) throw ConfigError("property suite needs at least one sample");
  const int d = spec.dim;
  ConeSampler sampler(d, spec.cone, seed, spec.cone_floor);
  std::mt19937_64 scale_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> log_c(std::log(0.1), std::log(10.0));

  constexpr double inf = std::numeric_limits<double>::infinity();
  double min_partial = inf;        // monotonicity: > 0
  double min_concavity = inf;      // concavity: >= -tol
  double max_homogeneity = 0.0;    // homogeneity: relative error
  double max_mean_excess = -inf;   // f <= mean: f - mean, scaled
  double min_grad_sum_gap = inf;   // sum f_i - 1 >= 0

  CurvatureVector ones = CurvatureVector::Ones(d);
  const double normalization = std::abs(eval_f(spec, ones) - 1.0);

  for (int s = 0; s < samples; ++s) {
    const CurvatureVector lambda = sampler.next();
    const CurvatureVector mu = sampler.next();
    const SpeedValue v = eval_f_with_grad(spec, lambda);

    min_partial = std::min(min_partial, v.grad.minCoeff());

    const CurvatureVector mid = 0.5 * (lambda + mu);
    const double margin = eval_f(spec, mid) - 0.5 * (v.f + eval_f(spec, mu));
    min_concavity = std::min(min_concavity, margin);

    const double c = std::exp(log_c(scale_rng));
    const CurvatureVector scaled = c * lambda;
    // the rounding of c * lambda is known exactly; its first-order effect enters the reference
    double reference = c * v.f;
    for (int i = 0; i < d; ++i) reference -= v.grad[i] * std::fma(c, lambda[i], -scaled[i]);
    const double rel = std::abs(eval_f(spec, scaled) - reference) / (c * v.f);
    max_homogeneity = std::max(max_homogeneity, rel);

    const double excess = (v.f - lambda.mean()) / std::max(1.0, std::abs(v.f));
    max_mean_excess = std::max(max_mean_excess, excess);

    min_grad_sum_gap = std::min(min_grad_sum_gap, v.grad.sum() - 1.0);
  }

  PropertyReport report{spec.name(), d, samples, seed, {}};
  report.conditions = {
      {"monotonicity", min_partial, 0.0, min_partial > 0.0},
      {"concavity", min_concavity, -1e-9, min_concavity >= -1e-9},
      {"homogeneity", max_homogeneity, 1e-12, max_homogeneity <= 1e-12},
      {"normalization", normalization, 0.0, normalization == 0.0},
      {"mean_bound", max_mean_excess, 1e-10, max_mean_excess <= 1e-10},
      {"gradient_sum", min_grad_sum_gap, -1e-10, min_grad_sum_gap >= -1e-10},
  };
  return report;
}

double large_shift_speed(const CurvatureFunctionSpec& spec,
                         std::span<const CurvatureVector> samples, double C) {
  for (const auto& s : samples) {
    if (int j = first_cone_violation(s, spec.cone, spec.cone_floor); j != 0) {
      throw DomainError("large-shift sample outside the cone", j);
    }
  }
  SpeedValue v;
  auto satisfied = [&](double R) {
    for (const auto& s : samples) {
      CurvatureVector shifted = s;
      shifted[shifted.size() - 1] += R;
      // very large shifts can fall below the relative cone floor
      if (try_eval_f_with_grad(spec, shifted, v) != 0 || v.f < C) return false;
    }
    return true;
  };
  if (satisfied(0.0)) return 0.0;
  for (double R = 1.0; R <= 1e12; R *= 2.0) {
    if (satisfied(R)) return R;
  }
  throw ConditionViolation("no shift R <= 1e12 lifts f to " + std::to_string(C) +
                           " on all samples");
}

}  // namespace curveflow
