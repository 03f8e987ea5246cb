#include "hardynorm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hardynorm/errors.hpp"

namespace hardynorm {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool opposite_signs(double a, double b) {
  return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

bool Bracket::valid() const noexcept {
  return lo < hi && opposite_signs(f_lo, f_hi);
}

Bracket Bracket::make(const RealFn& f, double lo, double hi) {
  Bracket b{lo, hi, f(lo), f(hi)};
  if (!b.valid()) {
    throw BracketError("no sign change on [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
  return b;
}

RootResult solve_bracketed(const RealFn& f, const Bracket& bracket, double tol,
                           int max_iter) {
  if (!bracket.valid()) {
    throw BracketError("bracket is empty or has no sign change");
  }
  if (!(tol > 0.0)) throw DomainError("root tolerance must be positive");

  // b: best estimate, c: the point on the other side of the root,
  // a: previous b. [min(b, c), max(b, c)] always brackets the root.
  double a = bracket.lo, fa = bracket.f_lo;
  double b = bracket.hi, fb = bracket.f_hi;
  double c = a, fc = fa;
  double d = b - a, e = d;

  for (int iter = 0; iter < max_iter; ++iter) {
    if (opposite_signs(fb, fc) == false && fb != 0.0) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double width = std::abs(c - b);
    if (fb == 0.0) return {b, b, b, iter};
    if (width <= tol) {
      return {b, std::min(b, c), std::max(b, c), iter};
    }

    // Step no smaller than half the requested width so the bracket keeps
    // collapsing even when interpolation stalls on one side.
    const double step_tol = std::max(0.5 * tol, 2.0 * kEps * std::abs(b));
    const double mid = 0.5 * (c - b);
    if (std::abs(e) >= step_tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * mid * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * mid * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * mid * q - std::abs(step_tol * q),
                             std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = mid;
        e = d;
      }
    } else {
      d = mid;
      e = d;
    }
    a = b;
    fa = fb;
    if (std::abs(d) > step_tol) {
      b += d;
    } else {
      b += (mid > 0.0 ? step_tol : -step_tol);
    }
    fb = f(b);
    if (std::isnan(fb)) {
      throw ConvergenceError("function returned NaN inside the bracket", a);
    }
  }
  throw ConvergenceError("root finder exceeded " + std::to_string(max_iter) +
                             " iterations",
                         b, std::abs(c - b));
}

double find_root_bracketed(const RealFn& f, const Bracket& bracket,
                           double tol) {
  return solve_bracketed(f, bracket, tol).root;
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
  double a;
  double b;
  double value;
  double error;
  int level;
};

struct ByError {
  bool operator()(const Piece& x, const Piece& y) const {
    return x.error < y.error;
  }
};

// QUADPACK qk15.
Piece gauss_kronrod(const RealFn& f, double a, double b, int level,
                    long& evals) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(res_k);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double dx = half * kXgk[jtw];
    f1[jtw] = f(center - dx);
    f2[jtw] = f(center + dx);
    res_g += kWg[j] * (f1[jtw] + f2[jtw]);
    res_k += kWgk[jtw] * (f1[jtw] + f2[jtw]);
    res_abs += kWgk[jtw] * (std::abs(f1[jtw]) + std::abs(f2[jtw]));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double dx = half * kXgk[jtwm1];
    f1[jtwm1] = f(center - dx);
    f2[jtwm1] = f(center + dx);
    res_k += kWgk[jtwm1] * (f1[jtwm1] + f2[jtwm1]);
    res_abs += kWgk[jtwm1] * (std::abs(f1[jtwm1]) + std::abs(f2[jtwm1]));
  }
  evals += 15;
  const double mean = 0.5 * res_k;
  double res_asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    res_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double scale = std::abs(half);
  res_asc *= scale;
  res_abs *= scale;
  double err = std::abs((res_k - res_g) * half);
  if (res_asc != 0.0 && err != 0.0) {
    err = res_asc * std::min(1.0, std::pow(200.0 * err / res_asc, 1.5));
  }
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * res_abs, err);
  }
  const double value = res_k * half;
  if (!std::isfinite(value) || !std::isfinite(err)) {
    throw ConvergenceError("integrand is not finite on [" + std::to_string(a) +
                               ", " + std::to_string(b) + "]",
                           std::numeric_limits<double>::quiet_NaN(), kInf);
  }
  return {a, b, value, err, level};
}

// Ratio of consecutive graded-panel integrals, if it looks geometric.
bool geometric_ratio(double inner, double outer, double& r) {
  if (outer == 0.0) return false;
  r = inner / outer;
  return r > 0.0 && r < 1.0;
}

}  // namespace

QuadResult integrate(const RealFn& f, double a, double b,
                     const QuadOptions& opts) {
  if (!(a < b)) throw DomainError("integration requires a < b");
  if (!(opts.abs_tol > 0.0) && !(opts.rel_tol > 0.0)) {
    throw DomainError("quadrature tolerance must be positive");
  }
  const double width = b - a;
  long evals = 0;

  std::priority_queue<Piece, std::vector<Piece>, ByError> heap;
  std::vector<double> level_value;
  std::vector<double> level_error;
  int intervals = 0;

  auto panel_edge = [&](int k) { return a + std::ldexp(width, -k); };
  auto add_level = [&]() -> bool {
    const int k = static_cast<int>(level_value.size());
    const double hi = panel_edge(k);
    const double lo = panel_edge(k + 1);
    if (!(lo > a) || !(lo < hi)) return false;
    Piece p = gauss_kronrod(f, lo, hi, k, evals);
    level_value.push_back(p.value);
    level_error.push_back(p.error);
    heap.push(p);
    ++intervals;
    return true;
  };

  constexpr int kInitialLevels = 8;
  for (int k = 0; k < kInitialLevels; ++k) {
    if (!add_level()) break;
  }

  auto sums = [&](double& value, double& error) {
    value = 0.0;
    error = 0.0;
    for (std::size_t k = 0; k < level_value.size(); ++k) {
      value += level_value[k];
      error += level_error[k];
    }
  };

  auto tail_estimate = [&](double& tail, double& tail_err) {
    const std::size_t n = level_value.size();
    tail = 0.0;
    if (n < 2) {
      tail_err = n == 1 ? std::abs(level_value[0]) : kInf;
      return;
    }
    const double i1 = level_value[n - 1];
    const double i2 = level_value[n - 2];
    double r = 0.0;
    const bool ok = geometric_ratio(i1, i2, r);
    if (ok) tail = i1 * r / (1.0 - r);
    double r_prev = 0.0;
    if (n >= 3 && ok && geometric_ratio(i2, level_value[n - 3], r_prev)) {
      const double predicted = i2 * r_prev / (1.0 - r_prev);
      tail_err = std::abs(i1 + tail - predicted);
    } else {
      tail_err = std::abs(i1) + std::abs(tail);
    }
    tail_err += 4.0 * kEps * std::abs(tail) + level_error[n - 1];
  };

  double value = 0.0, error = 0.0, tail = 0.0, tail_err = 0.0;
  for (;;) {
    sums(value, error);
    tail_estimate(tail, tail_err);
    const double total = value + tail;
    const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
    if (error + tail_err <= target) {
      return {total, error + tail_err, intervals,
              static_cast<int>(level_value.size()), evals};
    }
    if (error > 0.5 * target) {
      if (intervals >= opts.max_intervals) break;
      Piece worst = heap.top();
      heap.pop();
      const double mid = 0.5 * (worst.a + worst.b);
      if (!(mid > worst.a && mid < worst.b)) {
        // Interval at rounding resolution: its estimate is as good as it gets.
        level_error[worst.level] -= worst.error;
        worst.error = 0.0;
        heap.push(worst);
        continue;
      }
      Piece left = gauss_kronrod(f, worst.a, mid, worst.level, evals);
      Piece right = gauss_kronrod(f, mid, worst.b, worst.level, evals);
      level_value[worst.level] += left.value + right.value - worst.value;
      level_error[worst.level] += left.error + right.error - worst.error;
      heap.push(left);
      heap.push(right);
      ++intervals;
    } else {
      if (static_cast<int>(level_value.size()) >= opts.max_levels ||
          intervals >= opts.max_intervals || !add_level()) {
        break;
      }
    }
  }
  sums(value, error);
  tail_estimate(tail, tail_err);
  throw ConvergenceError("quadrature budget exhausted", value + tail,
                         error + tail_err);
}

double integrate_adaptive(const RealFn& f, double a, double b, double tol) {
  QuadOptions opts;
  opts.abs_tol = tol;
  return integrate(f, a, b, opts).value;
}

// ---------------------------------------------------------------------------
// Maximization
// ---------------------------------------------------------------------------

void OptConfig::validate() const {
  if (starts < 1) throw DomainError("starts must be at least 1");
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");
  if (!(x_tol > 0.0) || !(f_tol > 0.0)) {
    throw DomainError("optimizer tolerances must be positive");
  }
}

std::array<double, 2> SplitRegion::to_point(double u, double v) const noexcept {
  return {pivot - std::exp(u), pivot + std::exp(v)};
}

bool SplitRegion::contains(double alpha, double beta) const noexcept {
  return alpha < pivot && pivot < beta && std::isfinite(alpha) &&
         std::isfinite(beta);
}

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace {

struct Vertex {
  std::array<double, 2> x;
  double g;  // minimized objective, -f
};

struct LocalResult {
  std::array<double, 2> x;
  double g;
  bool converged;
};

LocalResult nelder_mead(const std::function<double(double, double)>& g,
                        std::array<double, 2> start, const OptConfig& cfg,
                        long& evals) {
  constexpr double kStep = 0.5;
  std::array<Vertex, 3> s{};
  s[0].x = start;
  s[1].x = {start[0] + kStep, start[1]};
  s[2].x = {start[0], start[1] + kStep};
  for (auto& v : s) {
    v.g = g(v.x[0], v.x[1]);
    ++evals;
  }
  auto order = [&] {
    std::sort(s.begin(), s.end(), [](const Vertex& l, const Vertex& r) {
      if (l.g != r.g) return l.g < r.g;
      return l.x < r.x;
    });
  };
  auto eval = [&](std::array<double, 2> x) {
    ++evals;
    return Vertex{x, g(x[0], x[1])};
  };

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    order();
    double diam = 0.0;
    for (int i = 1; i < 3; ++i) {
      diam = std::max(diam, std::hypot(s[i].x[0] - s[0].x[0],
                                       s[i].x[1] - s[0].x[1]));
    }
    const double spread = s[2].g - s[0].g;
    if (diam <= cfg.x_tol && std::isfinite(s[0].g) &&
        (spread <= cfg.f_tol || !std::isfinite(spread))) {
      return {s[0].x, s[0].g, std::isfinite(spread)};
    }
    const std::array<double, 2> c = {0.5 * (s[0].x[0] + s[1].x[0]),
                                     0.5 * (s[0].x[1] + s[1].x[1])};
    auto along = [&](double t) {
      return std::array<double, 2>{c[0] + t * (s[2].x[0] - c[0]),
                                   c[1] + t * (s[2].x[1] - c[1])};
    };
    const Vertex r = eval(along(-1.0));
    if (r.g < s[0].g) {
      const Vertex e = eval(along(-2.0));
      s[2] = e.g < r.g ? e : r;
      continue;
    }
    if (r.g < s[1].g) {
      s[2] = r;
      continue;
    }
    const bool outside = r.g < s[2].g;
    const Vertex k = eval(along(outside ? -0.5 : 0.5));
    if (k.g < (outside ? r.g : s[2].g) ||
        (k.g == s[2].g && !outside && std::isfinite(k.g))) {
      s[2] = k;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      s[i] = eval({s[0].x[0] + 0.5 * (s[i].x[0] - s[0].x[0]),
                   s[0].x[1] + 0.5 * (s[i].x[1] - s[0].x[1])});
    }
  }
  order();
  return {s[0].x, s[0].g, false};
}

bool better(double value, const std::array<double, 2>& point, double best_value,
            const std::array<double, 2>& best_point) {
  if (value != best_value) return value > best_value;
  return point < best_point;
}

}  // namespace

OptResult maximize_2d(const RealFn2& f, const SplitRegion& region,
                      const OptConfig& cfg) {
  cfg.validate();
  auto objective = [&](double u, double v) {
    const auto pt = region.to_point(u, v);
    if (!region.contains(pt[0], pt[1])) return kInf;
    const double val = f(pt[0], pt[1]);
    return std::isfinite(val) ? -val : kInf;
  };

  constexpr std::array<double, 5> kGrid = {-4.0, -2.0, 0.0, 2.0, 4.0};
  std::mt19937_64 rng(cfg.seed);
  OptResult best{{0.0, 0.0}, -kInf, false, 0};
  bool have_best = false;

  for (int i = 0; i < cfg.starts; ++i) {
    std::array<double, 2> start{};
    if (i < 25) {
      start[0] = kGrid[i / 5] + (unit_uniform(rng) - 0.5);
      start[1] = kGrid[i % 5] + (unit_uniform(rng) - 0.5);
    } else {
      start[0] = -6.0 + 12.0 * unit_uniform(rng);
      start[1] = -6.0 + 12.0 * unit_uniform(rng);
    }
    const LocalResult local = nelder_mead(objective, start, cfg, best.evals);
    const double value = -local.g;
    const auto point = region.to_point(local.x[0], local.x[1]);
    if (!std::isfinite(value)) continue;
    if (!have_best || better(value, point, best.value, best.argmax)) {
      best.argmax = point;
      best.value = value;
      best.converged = local.converged;
      have_best = true;
    }
  }
  if (!have_best) best.converged = false;
  return best;
}

Max1dResult maximize_scan_golden(const RealFn& f, double lo, double hi,
                                 int n_scan, double tol) {
  if (!(lo < hi) || n_scan < 3 || !(tol > 0.0)) {
    throw DomainError("maximize_scan_golden: bad interval or tolerance");
  }
  const double h = (hi - lo) / (n_scan - 1);
  int best_i = 0;
  double best_v = -kInf;
  for (int i = 0; i < n_scan; ++i) {
    const double v = f(lo + i * h);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  double a = lo + std::max(0, best_i - 1) * h;
  double b = lo + std::min(n_scan - 1, best_i + 1) * h;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  if (best_v > fx) return {lo + best_i * h, best_v};
  return {x, fx};
}

}  // namespace hardynorm
