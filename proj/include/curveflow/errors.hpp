#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace curveflow {

/// Base of all library errors. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration or violated precondition on inputs (CLI exit 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Curvature vector outside the cone of the speed function.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, int violated_index)
      : Error(what), violated_index_(violated_index) {}
  /// Index j of the first elementary symmetric function with H_j <= floor.
  int violated_index() const { return violated_index_; }

 private:
  int violated_index_;
};

/// A structural assumption on f could not be confirmed (e.g. the large-shift search failed).
class ConditionViolation : public Error {
 public:
  using Error::Error;
};

/// Admissibility lost at a grid node.
class AdmissibilityError : public Error {
 public:
  AdmissibilityError(const std::string& what, std::size_t node, std::vector<double> kappa)
      : Error(what), node_(node), kappa_(std::move(kappa)) {}
  std::size_t node() const { return node_; }
  const std::vector<double>& kappa() const { return kappa_; }

 private:
  std::size_t node_;
  std::vector<double> kappa_;
};

/// NaN, eigensolver breakdown or a step size collapse (CLI exit 3).
class NumericalFault : public Error {
 public:
  using Error::Error;
};

class StiffnessError : public NumericalFault {
 public:
  using NumericalFault::NumericalFault;
};

/// A closed-form solution was queried past its extinction time.
class ExtinctionError : public Error {
 public:
  using Error::Error;
};

}  // namespace curveflow
