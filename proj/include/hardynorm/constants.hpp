#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "hardynorm/errors.hpp"
#include "hardynorm/numerics.hpp"

namespace hardynorm {

/// Exponent p, subspace index m and operator coefficient lambda of
/// I - lambda * H_m acting on L^p(0, inf).
struct Params {
  double p;
  double m;
  double lambda;

  /// Throws DomainError naming the violated constraint.
  void validate() const;
};

/// gamma_{p,m} = m/2 + (p-1)/p, the reciprocal of the norm of H_m on L^p.
struct Gamma {
  double value;
};

Gamma gamma_pm(const Params& params);

enum class ConstantBranch {
  closed_form_m0_l1,
  lambda_nonpositive,
  p_equals_two,
  interior_optimum,
  boundary_limit,
};

std::string_view to_string(ConstantBranch branch);

struct ConstantResult {
  double c_pow_p;
  double c;
  ConstantBranch branch;
  /// Present iff branch == interior_optimum; then alpha < gamma < beta.
  std::optional<std::array<double, 2>> argmax;
  /// Present for the closed_form_m0_l1 branch.
  std::optional<double> alpha_p;
  /// max{1, |1 - lambda/gamma|^p}, the supremum of the ratio over the
  /// boundary of the feasible set.
  double boundary_value;
  bool converged = true;
};

/// The generic optimizer did not converge above the boundary value.
class SharpConstantError : public ConvergenceError {
 public:
  SharpConstantError(const std::string& what, ConstantResult best)
      : ConvergenceError(what, best.c_pow_p), best_(std::move(best)) {}
  const ConstantResult& best() const noexcept { return best_; }

 private:
  ConstantResult best_;
};

/// For p > 2 the unique negative root of (p-1)a + 2 - p = |a|^(p-2) a;
/// for 1 < p <= 2 the value (p-1)/p.
double alpha_star(double p);

/// C_p^p: 1/(p-1)^p for 1 < p <= 2 and (1 + |alpha_p|)^(p-2)/(p-1) for p > 2.
double cp_pow(double p);

/// |a-1|^p / (p(1-a) - 1 + |a|^p), the one-parameter ratio whose supremum
/// over a <= (p-1)/p is C_p^p. Undefined at a = 1.
double reduced_ratio(double alpha, double p);

/// Numerator K and denominator L of the two-parameter ratio.
struct RatioParts {
  double numerator;
  double denominator;
};

/// K = (b-g)|a-l|^p + (g-a)|b-l|^p and L = (b-g)|a|^p + (g-a)|b|^p.
/// Throws FeasibilityError unless alpha < gamma < beta.
RatioParts ratio_parts(const Params& params, double alpha, double beta);

/// K / L, i.e. the p-th power of c_{m,p,lambda}(alpha, beta).
double c_ratio(const Params& params, double alpha, double beta);

/// max{1, |1 - lambda/gamma|^p}.
double boundary_value(const Params& params);

/// lambda/gamma - 1. At lambda = 1 + m this is the conjectured norm of
/// I - (1+m) H_m.
double conjectured_value(const Params& params);

/// Sharp constant with branch detection: closed forms for lambda <= 0,
/// p = 2 and (m = 0, lambda = 1); otherwise optimize_constant().
ConstantResult sharp_constant(const Params& params, const OptConfig& cfg = {});

/// Maximizes c_ratio over alpha < gamma < beta and compares against the
/// boundary value. The interior optimum is reported only when it beats the
/// boundary by more than cfg.f_tol. Throws SharpConstantError if the
/// optimizer fails to converge on an interior optimum.
ConstantResult optimize_constant(const Params& params, const OptConfig& cfg = {});

}  // namespace hardynorm
