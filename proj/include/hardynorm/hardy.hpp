#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

#include "hardynorm/constants.hpp"

namespace hardynorm {

using Complex = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Piecewise-power algebra on (0, inf)
// ---------------------------------------------------------------------------

/// c * t^exponent on [lo, hi). hi may be +inf.
struct PowerPiece {
  Complex coeff;
  double exponent;
  double lo;
  double hi;
};

struct PowerTerm {
  Complex coeff;
  double exponent;
};

/// Finite sum of power terms on [lo, hi).
struct Segment {
  double lo;
  double hi;
  std::vector<PowerTerm> terms;

  Complex operator()(double t) const;
};

/// Function on (0, inf) that is a finite sum of powers on each of finitely
/// many consecutive half-open intervals, and zero elsewhere. Closed under
/// linear combination and under H_m.
class PiecewisePowerFn {
 public:
  PiecewisePowerFn() = default;

  /// Sums the pieces, splitting at every breakpoint. Overlaps add up; equal
  /// exponents on a segment are merged and exact cancellations dropped.
  explicit PiecewisePowerFn(const std::vector<PowerPiece>& pieces);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }

  /// One PowerPiece per term, in segment order.
  std::vector<PowerPiece> pieces() const;

  /// Value at t; zero outside the support. Right-continuous at breakpoints.
  Complex operator()(double t) const;

  bool is_real() const;

  /// Throws DivergenceError unless every term is p-integrable on its
  /// segment (p * exponent > -1 next to 0, < -1 on an infinite segment).
  void check_lp(double p) const;

  friend PiecewisePowerFn operator+(const PiecewisePowerFn& a,
                                    const PiecewisePowerFn& b);
  friend PiecewisePowerFn operator-(const PiecewisePowerFn& a,
                                    const PiecewisePowerFn& b);
  friend PiecewisePowerFn operator*(Complex s, const PiecewisePowerFn& f);

 private:
  std::vector<Segment> segments_;
};

/// Exact image under H_m f(t) = t^(-1-m/2) * int_0^t f(s) s^(m/2) ds.
///
/// Each term c t^a on [l, u) contributes c/(a+m/2+1) t^a on [l, u), a
/// t^(-1-m/2) correction on [l, u) when l > 0, and a t^(-1-m/2) tail on
/// [u, inf). Throws DivergenceError when a + m/2 + 1 is zero (logarithmic
/// case) or non-positive on a segment starting at 0.
PiecewisePowerFn apply_hm_closed(const PiecewisePowerFn& f, const Params& params);

/// f - lambda H_m f.
PiecewisePowerFn apply_i_minus_lambda_hm(const PiecewisePowerFn& f,
                                         const Params& params);

/// ||f||_p^p over (0, inf). Single-term segments integrate in closed form;
/// multi-term segments by adaptive quadrature (relative tolerance 1e-10).
double lp_norm_pow_closed(const PiecewisePowerFn& f, double p);

/// ||f||_p over (0, inf).
double lp_norm_closed(const PiecewisePowerFn& f, double p);

/// beta t^(beta-gamma-1/p) on [0,1) plus alpha t^(alpha-gamma-1/p) on
/// [1, inf). Throws FeasibilityError unless alpha < gamma < beta.
PiecewisePowerFn extremal_family(const Params& params, double alpha, double beta);

/// ||f - lambda H_m f||_p^p / ||f||_p^p for the extremal family, from the
/// closed-form norms of both sides.
double ratio_extremal(const Params& params, double alpha, double beta);

/// Closed-form ||f_{alpha,beta}||_p^p.
double extremal_norm_pow(const Params& params, double alpha, double beta);

// ---------------------------------------------------------------------------
// Sampled functions on [grid.front(), grid.back()]
// ---------------------------------------------------------------------------

struct SampledFn {
  std::vector<double> grid;
  std::vector<Complex> values;

  /// Throws DomainError unless the grid is nonempty, starts at >= 0, is
  /// strictly increasing and matches values in length.
  void validate() const;
  bool is_real() const;
};

/// Samples f at the grid points.
SampledFn sample(const PiecewisePowerFn& f, const std::vector<double>& grid);

/// H_m applied to the piecewise-linear interpolant of f, with exact
/// integration of s^(m/2) * (linear) on every cell. The function is taken to
/// vanish below grid[0]; at t = 0 the value is f(0)/(1 + m/2).
SampledFn apply_hm_sampled(const SampledFn& f, const Params& params);

/// f - lambda H_m f on the grid.
SampledFn apply_i_minus_lambda_hm(const SampledFn& f, const Params& params);

/// Trapezoidal integral of |f|^p over [grid.front(), grid.back()].
double lp_norm_pow_sampled(const SampledFn& f, double p);

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

/// ||H_m f_eps||_p / ||f_eps||_p for f_eps = t^(-1/p+eps) on [0, 1), through
/// the closed algebra. Tends to 1/gamma as eps -> 0. Requires 0 < eps < gamma.
double hardy_norm_witness(const Params& params, double eps);

struct NoninvertibilityWitness {
  double norm;          ///< ||H_m 1_[n,n+1)||_p
  double norm_pow_p;
  double bound_pow_p;   ///< ((n+1)^(1+m/2) - n^(1+m/2))^p / ((1+m/2)^p (p+pm/2-1) n^(p+pm/2-1))
};

NoninvertibilityWitness noninvertibility_witness(const Params& params, int n);

struct ComplexBoundReport {
  double lhs;     ///< ||f - lambda H_m f||_p on [0, T]
  double rhs;     ///< C ||f||_p on [0, T]
  double ratio;   ///< lhs / ||f||_p
  bool holds;     ///< lhs <= rhs (1 + tol)
  double domain_hi;
};

/// Grid check of ||f - lambda H_m f||_p <= C ||f||_p for complex f on
/// [0, T]; the operator acts on real and imaginary parts separately.
ComplexBoundReport verify_complex_bound(const SampledFn& f, const Params& params,
                                        double c, double tol = 1e-8);

}  // namespace hardynorm
