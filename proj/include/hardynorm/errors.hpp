#pragma once

#include <stdexcept>
#include <string>

namespace hardynorm {

/// Parameters outside the domain where the operators are defined
/// (p <= 1, m <= -2(p-1)/p, non-finite input, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point handed to c_ratio / the extremal family violates alpha < gamma < beta.
class FeasibilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Root bracket without a sign change.
class BracketError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A power term that is not in L^p on its interval, or an H_m image that
/// would need a logarithm.
class DivergenceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A required geometric structure (tangency points, a special-function
/// branch) could not be constructed.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A randomized generator exhausted its resampling budget.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method ran out of budget. Carries the best estimate found so
/// far and, where meaningful, the error bound achieved.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate,
                   double error_bound = 0.0)
      : std::runtime_error(what),
        best_estimate_(best_estimate),
        error_bound_(error_bound) {}

  double best_estimate() const noexcept { return best_estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double best_estimate_;
  double error_bound_;
};

}  // namespace hardynorm
