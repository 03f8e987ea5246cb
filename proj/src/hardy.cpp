#include "hardynorm/hardy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hardynorm/kernels.hpp"
#include "hardynorm/numerics.hpp"

namespace hardynorm {

namespace {

constexpr double kExponentTol = 1e-14;
constexpr double kEps = std::numeric_limits<double>::epsilon();

Complex power_term(const PowerTerm& term, double t) {
  if (term.coeff == Complex{}) return {};
  if (t == 0.0) {
    if (term.exponent > 0.0) return {};
    if (term.exponent == 0.0) return term.coeff;
    return term.coeff * kInfinity;
  }
  return term.coeff * std::pow(t, term.exponent);
}

bool same_exponent(double a, double b) {
  return std::abs(a - b) <= kExponentTol * std::max(1.0, std::abs(a));
}

// Adds `term` into `terms`, merging equal exponents. Sums that cancel to
// rounding level are dropped.
void accumulate(std::vector<PowerTerm>& terms, const PowerTerm& term) {
  if (term.coeff == Complex{}) return;
  for (auto it = terms.begin(); it != terms.end(); ++it) {
    if (!same_exponent(it->exponent, term.exponent)) continue;
    const Complex sum = it->coeff + term.coeff;
    const double scale = std::abs(it->coeff) + std::abs(term.coeff);
    if (std::abs(sum) <= 8.0 * kEps * scale) {
      terms.erase(it);
    } else {
      it->coeff = sum;
    }
    return;
  }
  terms.push_back(term);
}

void check_interval(double lo, double hi) {
  if (!(lo >= 0.0) || !(lo < hi) || std::isnan(hi)) {
    throw DomainError("power piece needs 0 <= lo < hi, got [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
}

}  // namespace

Complex Segment::operator()(double t) const {
  Complex sum{};
  for (const auto& term : terms) sum += power_term(term, t);
  return sum;
}

PiecewisePowerFn::PiecewisePowerFn(const std::vector<PowerPiece>& pieces) {
  std::vector<double> cuts;
  for (const auto& piece : pieces) {
    check_interval(piece.lo, piece.hi);
    if (!std::isfinite(piece.exponent)) throw DomainError("exponent must be finite");
    if (piece.coeff == Complex{}) continue;
    cuts.push_back(piece.lo);
    cuts.push_back(piece.hi);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment seg{cuts[i], cuts[i + 1], {}};
    for (const auto& piece : pieces) {
      if (piece.lo <= seg.lo && seg.hi <= piece.hi) {
        accumulate(seg.terms, {piece.coeff, piece.exponent});
      }
    }
    std::sort(seg.terms.begin(), seg.terms.end(),
              [](const PowerTerm& a, const PowerTerm& b) { return a.exponent < b.exponent; });
    segments_.push_back(std::move(seg));
  }
  while (!segments_.empty() && segments_.back().terms.empty()) segments_.pop_back();
  auto first = std::find_if(segments_.begin(), segments_.end(),
                            [](const Segment& s) { return !s.terms.empty(); });
  segments_.erase(segments_.begin(), first);
}

std::vector<PowerPiece> PiecewisePowerFn::pieces() const {
  std::vector<PowerPiece> out;
  for (const auto& seg : segments_) {
    for (const auto& term : seg.terms) {
      out.push_back({term.coeff, term.exponent, seg.lo, seg.hi});
    }
  }
  return out;
}

Complex PiecewisePowerFn::operator()(double t) const {
  for (const auto& seg : segments_) {
    if (seg.lo <= t && t < seg.hi) return seg(t);
  }
  return {};
}

bool PiecewisePowerFn::is_real() const {
  for (const auto& seg : segments_) {
    for (const auto& term : seg.terms) {
      if (term.coeff.imag() != 0.0) return false;
    }
  }
  return true;
}

void PiecewisePowerFn::check_lp(double p) const {
  for (const auto& seg : segments_) {
    for (const auto& term : seg.terms) {
      const double e = p * term.exponent + 1.0;
      if (seg.lo == 0.0 && !(e > 0.0)) {
        throw DivergenceError("term t^" + std::to_string(term.exponent) +
                              " is not p-integrable near 0");
      }
      if (std::isinf(seg.hi) && !(e < 0.0)) {
        throw DivergenceError("term t^" + std::to_string(term.exponent) +
                              " is not p-integrable near infinity");
      }
    }
  }
}

PiecewisePowerFn operator+(const PiecewisePowerFn& a, const PiecewisePowerFn& b) {
  auto pieces = a.pieces();
  const auto more = b.pieces();
  pieces.insert(pieces.end(), more.begin(), more.end());
  return PiecewisePowerFn(pieces);
}

PiecewisePowerFn operator*(Complex s, const PiecewisePowerFn& f) {
  auto pieces = f.pieces();
  for (auto& piece : pieces) piece.coeff *= s;
  return PiecewisePowerFn(pieces);
}

PiecewisePowerFn operator-(const PiecewisePowerFn& a, const PiecewisePowerFn& b) {
  return a + Complex{-1.0} * b;
}

PiecewisePowerFn apply_hm_closed(const PiecewisePowerFn& f, const Params& params) {
  params.validate();
  const double k = params.m / 2.0;
  const double tail_exp = -1.0 - k;
  std::vector<PowerPiece> out;
  for (const auto& seg : f.segments()) {
    for (const auto& term : seg.terms) {
      const double q = term.exponent + k + 1.0;
      if (std::abs(q) <= kExponentTol) {
        throw DivergenceError("H_m of t^" + std::to_string(term.exponent) +
                              " is logarithmic (exponent + m/2 = -1)");
      }
      if (seg.lo == 0.0 && q < 0.0) {
        throw DivergenceError("t^" + std::to_string(term.exponent) +
                              " s^(m/2) is not integrable at 0");
      }
      const Complex c = term.coeff;
      out.push_back({c / q, term.exponent, seg.lo, seg.hi});
      const double lo_q = seg.lo == 0.0 ? 0.0 : std::pow(seg.lo, q);
      if (seg.lo > 0.0) out.push_back({-c * lo_q / q, tail_exp, seg.lo, seg.hi});
      if (std::isfinite(seg.hi)) {
        // (hi^q - lo^q)/q without cancellation for narrow segments.
        double mass;
        if (seg.lo > 0.0) {
          mass = lo_q * std::expm1(q * std::log(seg.hi / seg.lo)) / q;
        } else {
          mass = std::pow(seg.hi, q) / q;
        }
        out.push_back({c * mass, tail_exp, seg.hi, kInfinity});
      }
    }
  }
  return PiecewisePowerFn(out);
}

PiecewisePowerFn apply_i_minus_lambda_hm(const PiecewisePowerFn& f,
                                         const Params& params) {
  return f - Complex{params.lambda} * apply_hm_closed(f, params);
}

namespace {

double single_term_pow_integral(const Segment& seg, double p) {
  const PowerTerm& term = seg.terms.front();
  const double c_pow = std::pow(std::abs(term.coeff), p);
  const double e = p * term.exponent + 1.0;
  if (std::isinf(seg.hi)) {
    if (seg.lo == 0.0 || !(e < 0.0)) {
      throw DivergenceError("segment [" + std::to_string(seg.lo) +
                            ", inf) is not in L^p");
    }
    return c_pow * std::pow(seg.lo, e) / -e;
  }
  if (seg.lo == 0.0) {
    if (!(e > 0.0)) throw DivergenceError("segment at 0 is not in L^p");
    return c_pow * std::pow(seg.hi, e) / e;
  }
  const double log_ratio = std::log(seg.hi / seg.lo);
  if (std::abs(e * log_ratio) < 1e-300) return c_pow * log_ratio;
  return c_pow * std::pow(seg.lo, e) * std::expm1(e * log_ratio) / e;
}

double multi_term_pow_integral(const Segment& seg, double p) {
  QuadOptions opts;
  opts.abs_tol = 1e-300;
  opts.rel_tol = 1e-10;
  opts.max_intervals = 20000;
  auto integrand = [&seg, p](double t) { return std::pow(std::abs(seg(t)), p); };
  if (std::isfinite(seg.hi)) {
    return integrate(integrand, seg.lo, seg.hi, opts).value;
  }
  // t = lo / x maps [lo, inf) onto (0, 1]; decay at infinity becomes an
  // integrable endpoint singularity at x = 0.
  const double lo = seg.lo == 0.0 ? 1.0 : seg.lo;
  double head = 0.0;
  if (seg.lo == 0.0) head = integrate(integrand, 0.0, 1.0, opts).value;
  auto mapped = [&integrand, lo](double x) { return integrand(lo / x) * lo / (x * x); };
  return head + integrate(mapped, 0.0, 1.0, opts).value;
}

}  // namespace

double lp_norm_pow_closed(const PiecewisePowerFn& f, double p) {
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  f.check_lp(p);
  double total = 0.0;
  for (const auto& seg : f.segments()) {
    if (seg.terms.empty()) continue;
    total += seg.terms.size() == 1 ? single_term_pow_integral(seg, p)
                                   : multi_term_pow_integral(seg, p);
  }
  return total;
}

double lp_norm_closed(const PiecewisePowerFn& f, double p) {
  return std::pow(lp_norm_pow_closed(f, p), 1.0 / p);
}

PiecewisePowerFn extremal_family(const Params& params, double alpha, double beta) {
  const double g = gamma_pm(params).value;
  if (!(alpha < g && g < beta)) {
    throw FeasibilityError("extremal family requires alpha < gamma < beta");
  }
  const double shift = g + 1.0 / params.p;
  return PiecewisePowerFn({{Complex{beta}, beta - shift, 0.0, 1.0},
                           {Complex{alpha}, alpha - shift, 1.0, kInfinity}});
}

double extremal_norm_pow(const Params& params, double alpha, double beta) {
  const double g = gamma_pm(params).value;
  if (!(alpha < g && g < beta)) {
    throw FeasibilityError("extremal family requires alpha < gamma < beta");
  }
  const double p = params.p;
  return std::pow(std::abs(beta), p) / (p * (beta - g)) -
         std::pow(std::abs(alpha), p) / (p * (alpha - g));
}

double ratio_extremal(const Params& params, double alpha, double beta) {
  const double g = gamma_pm(params).value;
  if (!(alpha < g && g < beta)) {
    throw FeasibilityError("extremal family requires alpha < gamma < beta");
  }
  const double p = params.p;
  const double l = params.lambda;
  const double image = std::pow(std::abs(beta - l), p) / (p * (beta - g)) -
                       std::pow(std::abs(alpha - l), p) / (p * (alpha - g));
  return image / extremal_norm_pow(params, alpha, beta);
}

// ---------------------------------------------------------------------------
// Sampled path
// ---------------------------------------------------------------------------

void SampledFn::validate() const {
  if (grid.empty()) throw DomainError("sampled function has an empty grid");
  if (grid.size() != values.size()) {
    throw DomainError("grid and values differ in length");
  }
  if (!(grid.front() >= 0.0)) throw DomainError("grid must start at t >= 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw DomainError("grid must be strictly increasing");
    }
  }
}

bool SampledFn::is_real() const {
  return std::all_of(values.begin(), values.end(),
                     [](const Complex& v) { return v.imag() == 0.0; });
}

SampledFn sample(const PiecewisePowerFn& f, const std::vector<double>& grid) {
  SampledFn out{grid, {}};
  out.values.reserve(grid.size());
  for (double t : grid) out.values.push_back(f(t));
  out.validate();
  return out;
}

namespace {

// int_a^b s^e ds for e > -1... written as (b^(e+1) - a^(e+1))/(e+1) with
// the difference formed without cancellation.
double power_moment(double a, double b, double e) {
  const double q = e + 1.0;
  if (a == 0.0) return std::pow(b, q) / q;
  return std::pow(a, q) * std::expm1(q * std::log1p((b - a) / a)) / q;
}

}  // namespace

SampledFn apply_hm_sampled(const SampledFn& f, const Params& params) {
  params.validate();
  f.validate();
  const double k = params.m / 2.0;
  const std::size_t n = f.grid.size();
  SampledFn out{f.grid, std::vector<Complex>(n)};

  Complex cumulative{};
  for (std::size_t i = 0; i < n; ++i) {
    const double t = f.grid[i];
    if (i > 0) {
      const double a = f.grid[i - 1];
      const double h = t - a;
      const double m0 = power_moment(a, t, k);
      // int_a^t s^k (s - a) ds
      const double m1 = power_moment(a, t, k + 1.0) - a * m0;
      const Complex fa = f.values[i - 1];
      const Complex slope = (f.values[i] - fa) / h;
      cumulative += fa * m0 + slope * m1;
    }
    if (t == 0.0) {
      out.values[i] = f.values[i] / (1.0 + k);
    } else {
      out.values[i] = cumulative / std::pow(t, 1.0 + k);
    }
  }
  return out;
}

SampledFn apply_i_minus_lambda_hm(const SampledFn& f, const Params& params) {
  SampledFn out = apply_hm_sampled(f, params);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = f.values[i] - params.lambda * out.values[i];
  }
  return out;
}

double lp_norm_pow_sampled(const SampledFn& f, double p) {
  f.validate();
  const std::size_t n = f.grid.size();
  if (n < 2) return 0.0;
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (f.grid[i + 1] - f.grid[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = f.values[i].real();
    im[i] = f.values[i].imag();
  }
  if (f.is_real()) return kernels::weighted_power_sum(w, re, p);
  return kernels::weighted_modulus_power_sum(w, re, im, p);
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

double hardy_norm_witness(const Params& params, double eps) {
  const double g = gamma_pm(params).value;
  if (!(eps > 0.0 && eps < g)) throw DomainError("eps must lie in (0, gamma)");
  const PiecewisePowerFn f({{Complex{1.0}, -1.0 / params.p + eps, 0.0, 1.0}});
  const PiecewisePowerFn hf = apply_hm_closed(f, params);
  return std::pow(lp_norm_pow_closed(hf, params.p) / lp_norm_pow_closed(f, params.p),
                  1.0 / params.p);
}

NoninvertibilityWitness noninvertibility_witness(const Params& params, int n) {
  params.validate();
  if (n < 1) throw DomainError("n must be at least 1");
  const double p = params.p;
  const double k = params.m / 2.0;
  const double nd = n;
  const PiecewisePowerFn f({{Complex{1.0}, 0.0, nd, nd + 1.0}});
  const double norm_pow = lp_norm_pow_closed(apply_hm_closed(f, params), p);
  const double e = p + p * k - 1.0;
  const double bound = std::pow(std::pow(nd + 1.0, 1.0 + k) - std::pow(nd, 1.0 + k), p) /
                       (std::pow(1.0 + k, p) * e * std::pow(nd, e));
  return {std::pow(norm_pow, 1.0 / p), norm_pow, bound};
}

ComplexBoundReport verify_complex_bound(const SampledFn& f, const Params& params,
                                        double c, double tol) {
  const SampledFn g = apply_i_minus_lambda_hm(f, params);
  const double p = params.p;
  const double f_norm = std::pow(lp_norm_pow_sampled(f, p), 1.0 / p);
  const double lhs = std::pow(lp_norm_pow_sampled(g, p), 1.0 / p);
  const double rhs = c * f_norm;
  return {lhs, rhs, f_norm > 0.0 ? lhs / f_norm : 0.0, lhs <= rhs * (1.0 + tol),
          f.grid.back()};
}

}  // namespace hardynorm
