#include "hardynorm/constants.hpp"

#include <algorithm>
#include <cmath>

namespace hardynorm {

void Params::validate() const {
  if (!std::isfinite(p) || !std::isfinite(m) || !std::isfinite(lambda)) {
    throw DomainError("p, m and lambda must be finite");
  }
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (!(m > -2.0 * (p - 1.0) / p)) {
    throw DomainError("m must exceed -2(p-1)/p");
  }
}

Gamma gamma_pm(const Params& params) {
  params.validate();
  return {params.m / 2.0 + (params.p - 1.0) / params.p};
}

std::string_view to_string(ConstantBranch branch) {
  switch (branch) {
    case ConstantBranch::closed_form_m0_l1: return "closed_form_m0_l1";
    case ConstantBranch::lambda_nonpositive: return "lambda_nonpositive";
    case ConstantBranch::p_equals_two: return "p_equals_two";
    case ConstantBranch::interior_optimum: return "interior_optimum";
    case ConstantBranch::boundary_limit: return "boundary_limit";
  }
  return "unknown";
}

double alpha_star(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must exceed 1");
  if (p <= 2.0) return (p - 1.0) / p;

  // g > 0 far to the left, g <= 0 on [alpha_p, 0).
  auto g = [p](double a) {
    return (p - 1.0) * a + 2.0 - p - std::pow(std::abs(a), p - 2.0) * a;
  };
  const double hi = -std::pow(p - 1.0, 1.0 / (p - 2.0));
  double lo = 2.0 * hi;
  while (!(g(lo) > 0.0)) {
    lo *= 2.0;
    if (!std::isfinite(lo)) throw ConvergenceError("alpha_p bracket search failed", hi);
  }
  const double tol = 1e-14 * std::max(1.0, std::abs(hi));
  return find_root_bracketed(g, Bracket::make(g, lo, hi), tol);
}

double cp_pow(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("p must exceed 1");
  if (p <= 2.0) return 1.0 / std::pow(p - 1.0, p);
  const double a = alpha_star(p);
  return std::pow(1.0 + std::abs(a), p - 2.0) / (p - 1.0);
}

double reduced_ratio(double alpha, double p) {
  if (alpha == 1.0) throw DomainError("reduced ratio is undefined at alpha = 1");
  return std::pow(std::abs(alpha - 1.0), p) /
         (p * (1.0 - alpha) - 1.0 + std::pow(std::abs(alpha), p));
}

RatioParts ratio_parts(const Params& params, double alpha, double beta) {
  const double g = gamma_pm(params).value;
  if (!(alpha < g && g < beta)) {
    throw FeasibilityError("ratio requires alpha < gamma < beta");
  }
  const double p = params.p;
  const double l = params.lambda;
  const double wa = beta - g;
  const double wb = g - alpha;
  return {wa * std::pow(std::abs(alpha - l), p) + wb * std::pow(std::abs(beta - l), p),
          wa * std::pow(std::abs(alpha), p) + wb * std::pow(std::abs(beta), p)};
}

double c_ratio(const Params& params, double alpha, double beta) {
  const RatioParts kl = ratio_parts(params, alpha, beta);
  return kl.numerator / kl.denominator;
}

double boundary_value(const Params& params) {
  const double g = gamma_pm(params).value;
  return std::max(1.0, std::pow(std::abs(1.0 - params.lambda / g), params.p));
}

double conjectured_value(const Params& params) {
  return params.lambda / gamma_pm(params).value - 1.0;
}

namespace {

ConstantResult from_c(double c, ConstantBranch branch, double p, double bv) {
  return {std::pow(c, p), c, branch, std::nullopt, std::nullopt, bv, true};
}

ConstantResult from_c_pow(double c_pow, ConstantBranch branch, double p,
                          double bv) {
  return {c_pow, std::pow(c_pow, 1.0 / p), branch, std::nullopt, std::nullopt,
          bv, true};
}

}  // namespace

ConstantResult optimize_constant(const Params& params, const OptConfig& cfg) {
  const double g = gamma_pm(params).value;
  const double bv = boundary_value(params);
  auto ratio = [&params](double a, double b) {
    const RatioParts kl = ratio_parts(params, a, b);
    return kl.numerator / kl.denominator;
  };
  const OptResult opt = maximize_2d(ratio, SplitRegion{g}, cfg);
  if (opt.value > bv + cfg.f_tol) {
    ConstantResult r = from_c_pow(opt.value, ConstantBranch::interior_optimum,
                                  params.p, bv);
    r.argmax = opt.argmax;
    r.converged = opt.converged;
    if (!opt.converged) {
      throw SharpConstantError("optimizer did not converge on an interior optimum", r);
    }
    return r;
  }
  ConstantResult r = from_c_pow(bv, ConstantBranch::boundary_limit, params.p, bv);
  // When the supremum is the boundary limit the search slides toward it
  // without meeting its tolerances; an unfinished search that stopped short
  // of the boundary value proves nothing about the interior.
  const bool reached = bv - opt.value <= cfg.f_tol * std::max(1.0, bv);
  if (!opt.converged && !reached) {
    r.converged = false;
    throw SharpConstantError("optimizer did not converge; boundary value unconfirmed", r);
  }
  return r;
}

ConstantResult sharp_constant(const Params& params, const OptConfig& cfg) {
  params.validate();
  cfg.validate();
  const double p = params.p;
  const double l = params.lambda;
  const double g = gamma_pm(params).value;
  const double bv = boundary_value(params);

  if (l <= 0.0) {
    return from_c(std::abs(l) / g + 1.0, ConstantBranch::lambda_nonpositive, p, bv);
  }
  if (p == 2.0) {
    return from_c(std::max(1.0, l / g - 1.0), ConstantBranch::p_equals_two, p, bv);
  }
  if (params.m == 0.0 && l == 1.0) {
    ConstantResult r = from_c_pow(cp_pow(p), ConstantBranch::closed_form_m0_l1, p, bv);
    r.alpha_p = alpha_star(p);
    return r;
  }
  return optimize_constant(params, cfg);
}

}  // namespace hardynorm
