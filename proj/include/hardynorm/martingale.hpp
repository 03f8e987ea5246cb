#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "hardynorm/errors.hpp"

namespace hardynorm {

// ---------------------------------------------------------------------------
// Extremal martingale
// ---------------------------------------------------------------------------

/// Starts at 1. While on top (value beta^k), moves to alpha beta^k with
/// probability s and stops there, or to beta^(k+1) with probability 1 - s.
/// beta = (1 - s alpha)/(1 - s) keeps the mean.
struct ExtremalMartingale {
  double alpha;
  double s;
  long n;

  double beta() const noexcept { return (1.0 - s * alpha) / (1.0 - s); }

  /// Throws DomainError unless alpha is finite, 0 < s < 1 and n >= 0.
  void validate() const;

  /// (1 - s) beta^p > 1: the top branch dominates the p-th moment.
  bool top_dominates(double p) const;
};

struct TerminalAtom {
  double value;
  double prob;
  /// True for the single atom beta^n that never stopped.
  bool top;
};

/// Law of f_n: alpha beta^k with probability s (1 - s)^k for k < n, and
/// beta^n with probability (1 - s)^n.
std::vector<TerminalAtom> terminal_distribution(const ExtremalMartingale& em);

/// ||f_n - f_n^*||_p^p / ||f_n||_p^p from the exact law, summed in log space
/// so n can be large. n = 0 gives 0. Throws DomainError for alpha = 0.
double extremal_ratio_exact(const ExtremalMartingale& em, double p);

/// |alpha - 1|^p / (|alpha|^p - p alpha + p - 1). Throws DomainError for
/// alpha = 1.
double limit_ratio(double alpha, double p);

// ---------------------------------------------------------------------------
// Simple martingales as probability trees
// ---------------------------------------------------------------------------

struct MartingaleNode {
  double value;
  /// Conditional probability given the parent; 1 at the root.
  double prob;
  std::vector<MartingaleNode> children;
};

/// Every leaf sits at depth `depth`.
struct SimpleMartingale {
  MartingaleNode root;
  int depth;
};

struct InvariantReport {
  double max_prob_error;
  double max_mean_error;
  bool holds;
};

/// Children probabilities sum to 1 and average to the parent value, within
/// tol; root prob is 1; every leaf is at the stated depth.
InvariantReport check_martingale_invariant(const SimpleMartingale& sm,
                                           double tol = 1e-12);

/// Index pairs (i, j) with values[i] <= parent <= values[j] covering every
/// value once at least. Values equal to parent pair with themselves.
std::vector<std::pair<std::size_t, std::size_t>> mean_matching_pairs(
    double parent, std::span<const double> values);

/// Probabilities over `values` with mean `parent`: each pair from
/// mean_matching_pairs gets the two-point law with that mean, and the pairs
/// are mixed with `pair_weights` (equal weights when empty). Throws
/// DomainError when parent lies outside the values' range.
std::vector<double> mean_matching_probabilities(double parent,
                                                std::span<const double> values,
                                                std::span<const double> pair_weights = {});

/// Seeded random tree: root uniform in [-value_scale, value_scale], each
/// node has 2..max_branch children uniform in [x - value_scale,
/// x + value_scale], redrawn until they straddle x. Throws GenerationError
/// when redraws run out.
SimpleMartingale random_simple_martingale(std::uint64_t seed, int depth,
                                          int max_branch, double value_scale);

/// The extremal martingale as a tree; stopped paths carry a single
/// constant child per step. Intended for small n.
SimpleMartingale extremal_tree(const ExtremalMartingale& em);

enum class MaximalVariant {
  /// ||f_n - f_n^*||_p <= C ||f_n||_p.
  plain,
  /// || |f_n| - max_j |f_j| ||_p <= C ||f_n||_p.
  absolute,
};

struct MaximalReport {
  double lhs;    ///< ||f_n - f_n^*||_p (or the absolute variant)
  double rhs;    ///< C ||f_n||_p
  double ratio;  ///< lhs / ||f_n||_p; 0 when f_n = 0 a.s.
  bool passed;
};

/// Exhaustive walk over all leaves; both sides are exact finite sums.
MaximalReport verify_maximal_inequality(const SimpleMartingale& sm, double p,
                                        double c,
                                        MaximalVariant variant = MaximalVariant::plain,
                                        double tol = 1e-12);

struct FuzzConfig {
  std::uint64_t first_seed = 0;
  long trees = 1000;
  int depth = 4;
  int max_branch = 3;
  double value_scale = 1.0;
  double p = 2.0;
  double c = 1.0;
  MaximalVariant variant = MaximalVariant::plain;
  int jobs = 1;
};

struct FuzzRow {
  std::uint64_t seed;
  double ratio;
  bool passed;
};

/// One row per seed first_seed, first_seed + 1, ..., in seed order
/// regardless of jobs.
std::vector<FuzzRow> fuzz_maximal_inequality(const FuzzConfig& cfg);

}  // namespace hardynorm
