#include "hardynorm/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "hardynorm/numerics.hpp"

namespace hardynorm {

void ExtremalMartingale::validate() const {
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1)");
  if (n < 0) throw DomainError("n must be nonnegative");
}

bool ExtremalMartingale::top_dominates(double p) const {
  return std::log1p(-s) + p * std::log(std::abs(beta())) > 0.0;
}

std::vector<TerminalAtom> terminal_distribution(const ExtremalMartingale& em) {
  em.validate();
  const double b = em.beta();
  std::vector<TerminalAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(em.n) + 1);
  double top_value = 1.0;
  double top_prob = 1.0;
  for (long k = 0; k < em.n; ++k) {
    atoms.push_back({em.alpha * top_value, em.s * top_prob, false});
    top_value *= b;
    top_prob *= 1.0 - em.s;
  }
  atoms.push_back({top_value, top_prob, true});
  return atoms;
}

namespace {

/// log(sum_{k<n} q^k) for q > 0, n >= 1, given log q.
double log_geometric_sum(double log_q, long n) {
  const double nd = static_cast<double>(n);
  if (log_q == 0.0) return std::log(nd);
  if (log_q > 0.0) {
    // q^n (1 - q^-n) / (q - 1)
    return nd * log_q + std::log1p(-std::exp(-nd * log_q)) - std::log(std::expm1(log_q));
  }
  return std::log(-std::expm1(nd * log_q)) - std::log(-std::expm1(log_q));
}

}  // namespace

double extremal_ratio_exact(const ExtremalMartingale& em, double p) {
  em.validate();
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (em.alpha == 0.0) throw DomainError("alpha must be nonzero");
  if (em.n == 0) return 0.0;
  const double b = em.beta();
  if (!(b > 0.0)) throw DomainError("beta must be positive");
  // Stopped mass A = s |alpha|^p sum_{k<n} q^k with q = (1 - s) beta^p;
  // the top atom carries q^n. f_n - f_n^* = (1 - 1/alpha) f_n off the top.
  const double log_q = std::log1p(-em.s) + p * std::log(b);
  const double log_stopped = std::log(em.s) + p * std::log(std::abs(em.alpha)) +
                             log_geometric_sum(log_q, em.n);
  const double factor = std::pow(std::abs(1.0 - 1.0 / em.alpha), p);
  return factor / (1.0 + std::exp(static_cast<double>(em.n) * log_q - log_stopped));
}

double limit_ratio(double alpha, double p) {
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (alpha == 1.0) throw DomainError("limit ratio is undefined at alpha = 1");
  return std::pow(std::abs(alpha - 1.0), p) /
         (std::pow(std::abs(alpha), p) - p * alpha + p - 1.0);
}

// ---------------------------------------------------------------------------

namespace {

void check_node(const MartingaleNode& node, int level, int depth, double tol,
                InvariantReport& report) {
  if (node.children.empty()) {
    if (level != depth) report.holds = false;
    return;
  }
  double mass = 0.0;
  double mean = 0.0;
  for (const auto& child : node.children) {
    if (!(child.prob >= 0.0)) report.holds = false;
    mass += child.prob;
    mean += child.prob * child.value;
  }
  report.max_prob_error = std::max(report.max_prob_error, std::abs(mass - 1.0));
  const double scale = std::max(1.0, std::abs(node.value));
  report.max_mean_error =
      std::max(report.max_mean_error, std::abs(mean - node.value) / scale);
  for (const auto& child : node.children) check_node(child, level + 1, depth, tol, report);
}

}  // namespace

InvariantReport check_martingale_invariant(const SimpleMartingale& sm, double tol) {
  InvariantReport report{0.0, 0.0, true};
  report.max_prob_error = std::abs(sm.root.prob - 1.0);
  check_node(sm.root, 0, sm.depth, tol, report);
  report.holds = report.holds && report.max_prob_error <= tol &&
                 report.max_mean_error <= tol;
  return report;
}

std::vector<std::pair<std::size_t, std::size_t>> mean_matching_pairs(
    double parent, std::span<const double> values) {
  std::vector<std::size_t> below, above;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < parent) {
      below.push_back(i);
    } else if (values[i] > parent) {
      above.push_back(i);
    } else {
      pairs.emplace_back(i, i);
    }
  }
  if (below.empty() != above.empty()) {
    throw DomainError("parent value lies outside the range of the children");
  }
  const std::size_t count = std::max(below.size(), above.size());
  for (std::size_t k = 0; k < count; ++k) {
    pairs.emplace_back(below[k % below.size()], above[k % above.size()]);
  }
  return pairs;
}

std::vector<double> mean_matching_probabilities(double parent,
                                                std::span<const double> values,
                                                std::span<const double> pair_weights) {
  if (values.empty()) throw DomainError("no children to match");
  const auto pairs = mean_matching_pairs(parent, values);
  if (!pair_weights.empty() && pair_weights.size() != pairs.size()) {
    throw DomainError("expected " + std::to_string(pairs.size()) + " pair weights");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double w = pair_weights.empty() ? 1.0 : pair_weights[k];
    if (!(w >= 0.0)) throw DomainError("pair weights must be nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("pair weights sum to zero");

  std::vector<double> probs(values.size(), 0.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double w = (pair_weights.empty() ? 1.0 : pair_weights[k]) / total;
    const auto [i, j] = pairs[k];
    if (i == j) {
      probs[i] += w;
      continue;
    }
    const double lo = values[i];
    const double hi = values[j];
    probs[i] += w * (hi - parent) / (hi - lo);
    probs[j] += w * (parent - lo) / (hi - lo);
  }
  return probs;
}

namespace {

constexpr int kRedrawBudget = 1000;

void grow(MartingaleNode& node, int remaining, int max_branch, double scale,
          std::mt19937_64& rng) {
  if (remaining == 0) return;
  const int branches = 2 + static_cast<int>(unit_uniform(rng) * (max_branch - 1));
  std::vector<double> values(static_cast<std::size_t>(branches));
  bool straddles = false;
  for (int attempt = 0; attempt < kRedrawBudget && !straddles; ++attempt) {
    for (double& v : values) v = node.value + scale * (2.0 * unit_uniform(rng) - 1.0);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    straddles = *lo < node.value && node.value < *hi;
  }
  if (!straddles) throw GenerationError("children failed to straddle the parent value");

  const auto pairs = mean_matching_pairs(node.value, values);
  std::vector<double> weights(pairs.size());
  for (double& w : weights) w = 0.05 + unit_uniform(rng);
  const auto probs = mean_matching_probabilities(node.value, values, weights);

  node.children.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    node.children.push_back({values[i], probs[i], {}});
    grow(node.children.back(), remaining - 1, max_branch, scale, rng);
  }
}

}  // namespace

SimpleMartingale random_simple_martingale(std::uint64_t seed, int depth,
                                          int max_branch, double value_scale) {
  if (depth < 1) throw DomainError("depth must be at least 1");
  if (max_branch < 2) throw DomainError("max_branch must be at least 2");
  if (!(value_scale > 0.0) || !std::isfinite(value_scale)) {
    throw DomainError("value_scale must be positive");
  }
  std::mt19937_64 rng(seed);
  SimpleMartingale sm{{value_scale * (2.0 * unit_uniform(rng) - 1.0), 1.0, {}}, depth};
  grow(sm.root, depth, max_branch, value_scale, rng);
  return sm;
}

namespace {

void extend_stopped(MartingaleNode& node, long remaining) {
  MartingaleNode* cur = &node;
  for (long k = 0; k < remaining; ++k) {
    cur->children.push_back({cur->value, 1.0, {}});
    cur = &cur->children.back();
  }
}

}  // namespace

SimpleMartingale extremal_tree(const ExtremalMartingale& em) {
  em.validate();
  if (em.n > 1000) throw DomainError("extremal tree is limited to n <= 1000");
  const double b = em.beta();
  SimpleMartingale sm{{1.0, 1.0, {}}, static_cast<int>(em.n)};
  MartingaleNode* top = &sm.root;
  for (long k = 0; k < em.n; ++k) {
    top->children.push_back({em.alpha * top->value, em.s, {}});
    extend_stopped(top->children.back(), em.n - k - 1);
    top->children.push_back({b * top->value, 1.0 - em.s, {}});
    top = &top->children.back();
  }
  return sm;
}

namespace {

struct PathSums {
  double lhs = 0.0;
  double norm = 0.0;
};

void walk(const MartingaleNode& node, double prob, double running_max, double p,
          MaximalVariant variant, PathSums& sums) {
  const double x = variant == MaximalVariant::absolute ? std::abs(node.value) : node.value;
  running_max = std::max(running_max, x);
  if (node.children.empty()) {
    sums.lhs += prob * std::pow(std::abs(x - running_max), p);
    sums.norm += prob * std::pow(std::abs(node.value), p);
    return;
  }
  for (const auto& child : node.children) {
    walk(child, prob * child.prob, running_max, p, variant, sums);
  }
}

}  // namespace

MaximalReport verify_maximal_inequality(const SimpleMartingale& sm, double p, double c,
                                        MaximalVariant variant, double tol) {
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (!(c >= 0.0)) throw DomainError("C must be nonnegative");
  PathSums sums;
  walk(sm.root, sm.root.prob, -std::numeric_limits<double>::infinity(), p, variant, sums);
  const double lhs = std::pow(sums.lhs, 1.0 / p);
  const double norm = std::pow(sums.norm, 1.0 / p);
  const double rhs = c * norm;
  return {lhs, rhs, norm > 0.0 ? lhs / norm : 0.0, lhs <= rhs * (1.0 + tol) + 1e-300};
}

std::vector<FuzzRow> fuzz_maximal_inequality(const FuzzConfig& cfg) {
  if (cfg.trees < 0) throw DomainError("tree count must be nonnegative");
  const auto count = static_cast<std::size_t>(cfg.trees);
  std::vector<FuzzRow> rows(count);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint64_t seed = cfg.first_seed + i;
      const auto sm = random_simple_martingale(seed, cfg.depth, cfg.max_branch, cfg.value_scale);
      const auto report = verify_maximal_inequality(sm, cfg.p, cfg.c, cfg.variant);
      rows[i] = {seed, report.ratio, report.passed};
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(cfg.jobs, 1)),
                                                   1, std::max<std::size_t>(count, 1));
  if (jobs == 1) {
    run_range(0, count);
    return rows;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(jobs);
  const std::size_t chunk = (count + jobs - 1) / jobs;
  for (std::size_t j = 0; j < jobs; ++j) {
    const std::size_t begin = std::min(count, j * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    workers.emplace_back([&, j, begin, end] {
      try {
        run_range(begin, end);
      } catch (...) {
        failures[j] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return rows;
}

}  // namespace hardynorm
