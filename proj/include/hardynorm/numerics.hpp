#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>

namespace hardynorm {

using RealFn = std::function<double(double)>;
using RealFn2 = std::function<double(double, double)>;

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Interval [lo, hi] with the function values at both ends. Valid brackets
/// have lo < hi and strictly opposite signs at the endpoints.
struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;

  /// Evaluates f at both ends. Throws BracketError if the result is not a
  /// valid bracket.
  static Bracket make(const RealFn& f, double lo, double hi);

  bool valid() const noexcept;
};

struct RootResult {
  double root;
  /// Final bracket; hi - lo <= tol and f(lo) * f(hi) <= 0.
  double lo;
  double hi;
  int iterations;
};

/// Brent's method (bisection / secant / inverse quadratic interpolation)
/// keeping a sign-changing bracket at all times. Terminates when the bracket
/// is no wider than tol, or on an exact zero.
///
/// Throws BracketError for an invalid bracket and ConvergenceError (carrying
/// the best estimate) when max_iter is exhausted.
RootResult solve_bracketed(const RealFn& f, const Bracket& bracket, double tol,
                           int max_iter = 300);

/// Convenience wrapper returning only the root.
double find_root_bracketed(const RealFn& f, const Bracket& bracket, double tol);

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  /// Total Gauss-Kronrod intervals across all panels.
  int max_intervals = 4000;
  /// Geometric grading levels toward the left endpoint.
  int max_levels = 1000;
};

struct QuadResult {
  double value;
  double error;
  int intervals;
  int levels;
  long evals;
};

/// Integrates f over [a, b]. The interval is graded geometrically toward a
/// (panel widths halve) so an integrable power singularity t^s, s > -1, at
/// the left endpoint is resolved; the unresolved remainder next to a is
/// extrapolated from the ratio of the two innermost panels. Each panel is
/// refined adaptively with a 7/15-point Gauss-Kronrod pair.
///
/// Converges when the estimated error is at most
/// max(abs_tol, rel_tol * |value|). Otherwise throws ConvergenceError with
/// the best estimate and the achieved error bound.
QuadResult integrate(const RealFn& f, double a, double b,
                     const QuadOptions& opts = {});

/// integrate() with an absolute tolerance.
double integrate_adaptive(const RealFn& f, double a, double b, double tol);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// Uniform double in [0, 1) from the top 53 bits of one draw. Reproducible
/// across standard libraries, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Derivative-free maximization
// ---------------------------------------------------------------------------

struct OptConfig {
  int starts = 25;
  int max_iter = 4000;
  double x_tol = 1e-9;
  double f_tol = 1e-12;
  std::uint64_t seed = 0;

  /// Throws DomainError unless tolerances are positive and counts >= 1.
  void validate() const;
};

/// The open region {(alpha, beta) : alpha < pivot < beta}. The optimizer
/// works in unconstrained coordinates (u, v) with
/// alpha = pivot - exp(u), beta = pivot + exp(v).
struct SplitRegion {
  double pivot;

  std::array<double, 2> to_point(double u, double v) const noexcept;
  bool contains(double alpha, double beta) const noexcept;
};

struct OptResult {
  std::array<double, 2> argmax;
  double value;
  bool converged;
  long evals;
};

/// Multistart Nelder-Mead maximization of f over a SplitRegion.
///
/// Starts are the grid u, v in {-4, -2, 0, 2, 4} with seeded jitter, then
/// seeded uniform draws in [-6, 6]^2 once the grid is used up. Non-finite
/// values and points that round onto the region boundary count as -inf.
/// The winner is the best value; ties go to the lexicographically smallest
/// argmax. Seed-deterministic.
OptResult maximize_2d(const RealFn2& f, const SplitRegion& region,
                      const OptConfig& cfg);

struct Max1dResult {
  double argmax;
  double value;
};

/// Scans n_scan equispaced points of [lo, hi], then golden-section refines
/// around the best one down to an interval of width tol.
Max1dResult maximize_scan_golden(const RealFn& f, double lo, double hi,
                                 int n_scan, double tol);

}  // namespace hardynorm
