#include "hardynorm/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hardynorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_pow(double y, double p) {
  if (y == 0.0) return 0.0;
  return std::pow(std::abs(y), p - 2.0) * y;
}

double effective_lambda(const SpecialFnSpec& spec) {
  return spec.branch == SpecialBranch::mart_m0_l1 ? 1.0 : spec.params.lambda;
}

kernels::MajorantArgs majorant_args(const SpecialFnSpec& spec, double y) {
  return {spec.params.p, effective_lambda(spec), spec.c_pow_p, spec.slope,
          spec.gamma, y};
}

/// Merges `gap` at witness (x, y) into a running report.
void record(ViolationReport& report, double gap, double x, double y) {
  if (gap > report.max_violation) {
    report.max_violation = gap;
    report.witness = std::array<double, 2>{x, y};
  }
}

ViolationReport empty_report() { return {-kInf, std::nullopt, 0, false}; }

void finish(ViolationReport& report, double tol) {
  report.passed = report.max_violation <= tol;
}

}  // namespace

std::string_view to_string(SpecialBranch branch) {
  switch (branch) {
    case SpecialBranch::mart_m0_l1: return "mart_m0_l1";
    case SpecialBranch::general_first_case: return "general_first_case";
    case SpecialBranch::general_second_case: return "general_second_case";
  }
  return "unknown";
}

double V_eval(const SpecialFnSpec& spec, double x, double y) {
  const double p = spec.params.p;
  return std::pow(std::abs(x - effective_lambda(spec) * y), p) -
         spec.c_pow_p * std::pow(std::abs(x), p);
}

double U_eval(const SpecialFnSpec& spec, double x, double y) {
  return spec.slope * signed_pow(y, spec.params.p) * (x - spec.gamma * y);
}

double U_dx(const SpecialFnSpec& spec, double y) {
  return spec.slope * signed_pow(y, spec.params.p);
}

namespace {

SpecialFnSpec mart_spec(const Params& params) {
  const double p = params.p;
  const double a = alpha_star(p);
  SpecialFnSpec spec{params, cp_pow(p), SpecialBranch::mart_m0_l1,
                     -p * std::pow(std::abs(1.0 - a), p - 2.0) / (p - 1.0),
                     (p - 1.0) / p, std::nullopt, {}};
  return spec;
}

constexpr long kFirstCaseGrid = 100000;

/// Tries the tangent-at-gamma construction. Returns nullopt when V <= U
/// fails somewhere on the verification grid.
std::optional<SpecialFnSpec> try_first_case(const Params& params, double g) {
  const double p = params.p;
  const double l = params.lambda;
  if (!(l > 2.0 * g)) return std::nullopt;
  const double c = l / g - 1.0;
  SpecialFnSpec spec{params, std::pow(c, p), SpecialBranch::general_first_case,
                     -p * std::pow(l - g, p - 1.0) * l / g, g, std::nullopt, {}};
  if (!(1.0 - spec.c_pow_p < 0.0)) return std::nullopt;

  const double reach = 1e3 * std::max(1.0, l);
  const double scale = std::max(1.0, std::pow(l, p));
  const double tol = 1e-9 * scale;
  const auto gap = kernels::max_majorant_gap(majorant_args(spec, 1.0), -reach,
                                             reach, kFirstCaseGrid);
  if (gap.max_gap > tol) return std::nullopt;

  // Equality at x = gamma is the tangency itself; near-equality elsewhere
  // means the first case is only marginally valid.
  const double gap_width = 1e-3 * std::max(1.0, g);
  double away = -kInf;
  if (g - gap_width > -reach) {
    away = std::max(away, kernels::max_majorant_gap(majorant_args(spec, 1.0), -reach,
                                                    g - gap_width, kFirstCaseGrid / 2)
                              .max_gap);
  }
  away = std::max(away, kernels::max_majorant_gap(majorant_args(spec, 1.0),
                                                  g + gap_width, reach,
                                                  kFirstCaseGrid / 2)
                            .max_gap);
  if (away > -tol) {
    spec.warnings.push_back(
        "branch ambiguity: tangent-at-gamma majorant is within tolerance of V "
        "away from x = gamma");
  }
  return spec;
}

}  // namespace

SpecialFnSpec build_special_fn(const Params& params, const OptConfig& cfg) {
  params.validate();
  if (params.m == 0.0 && params.lambda == 1.0) return mart_spec(params);
  if (!(params.lambda > 0.0)) {
    throw DomainError("special function needs lambda > 0 (or m = 0, lambda = 1)");
  }
  if (params.p == 2.0) {
    throw DomainError("special function needs p != 2 (or m = 0, lambda = 1)");
  }
  const double g = gamma_pm(params).value;
  if (auto first = try_first_case(params, g)) return *first;

  const ConstantResult constant = sharp_constant(params, cfg);
  if (constant.branch != ConstantBranch::interior_optimum || !constant.argmax) {
    throw StructuralError(
        "no interior optimum for the two-point construction (branch " +
        std::string(to_string(constant.branch)) + ")");
  }
  const auto [alpha, beta] = *constant.argmax;
  SpecialFnSpec spec{params, constant.c_pow_p, SpecialBranch::general_second_case,
                     0.0, g, constant.argmax, {}};
  spec.slope = (V_eval(spec, beta, 1.0) - V_eval(spec, alpha, 1.0)) / (beta - alpha);
  if (!(spec.slope < 0.0)) {
    throw StructuralError("two-point construction produced a non-negative slope");
  }
  return spec;
}

ViolationReport check_majorization(const SpecialFnSpec& spec, double x_lo,
                                   double x_hi, long n_points, double tol,
                                   kernels::Isa isa) {
  if (n_points < 2 || !(x_lo < x_hi)) {
    throw DomainError("majorization grid needs x_lo < x_hi and at least 2 points");
  }
  ViolationReport report = empty_report();
  const auto n = static_cast<std::size_t>(n_points);
  for (double y : {1.0, -1.0}) {
    const auto gap = kernels::max_majorant_gap(majorant_args(spec, y), x_lo, x_hi, n, isa);
    record(report, gap.max_gap, kernels::grid_point(x_lo, x_hi, n, gap.index), y);
    report.points_checked += n_points;
  }
  // V - U ~ (1 - C^p)|x|^p for large |x| on every slice.
  const double leading = 1.0 - spec.c_pow_p;
  if (!(leading < 0.0)) {
    record(report, kInf, x_hi, 1.0);
  }
  finish(report, tol);
  return report;
}

BurkholderReport check_burkholder_conditions(const SpecialFnSpec& spec,
                                             const BurkholderGrid& grid,
                                             double tol) {
  if (spec.branch != SpecialBranch::mart_m0_l1) {
    throw DomainError("Burkholder conditions apply to the mart_m0_l1 branch");
  }
  if (grid.n < 3 || !(grid.radius > 0.0)) {
    throw DomainError("Burkholder grid needs radius > 0 and n >= 3");
  }
  const double r = grid.radius;
  const auto n = static_cast<std::size_t>(grid.n);
  auto at = [&](std::size_t i) { return kernels::grid_point(-r, r, n, i); };

  BurkholderReport out{empty_report(), empty_report(), empty_report(), empty_report()};

  // 1. x <= y: for every row y, x runs over [-r, y] at the same density.
  for (std::size_t j = 0; j < n; ++j) {
    const double y = at(j);
    if (j == 0) {
      record(out.majorization, V_eval(spec, y, y) - U_eval(spec, y, y), y, y);
      ++out.majorization.points_checked;
      continue;
    }
    const auto gap = kernels::max_majorant_gap(majorant_args(spec, y), -r, y, j + 1);
    record(out.majorization, gap.max_gap, kernels::grid_point(-r, y, j + 1, gap.index), y);
    out.majorization.points_checked += static_cast<long>(j + 1);
  }

  // 2. U(x, x) <= 0.
  for (std::size_t i = 0; i < n; ++i) {
    const double x = at(i);
    record(out.initial, U_eval(spec, x, x), x, x);
    ++out.initial.points_checked;
  }

  // 3. z = x + h ranges over the whole line; only z > y changes the maximum.
  for (std::size_t j = 0; j < n; ++j) {
    const double y = at(j);
    for (std::size_t i = 0; i < n; ++i) {
      const double z = at(i);
      const double lhs = U_eval(spec, z, std::max(z, y));
      const double rhs = U_eval(spec, z, y);
      const double scale = std::max(1.0, std::abs(rhs));
      record(out.maximal, (lhs - rhs) / scale, z, y);
      ++out.maximal.points_checked;
    }
  }

  // 4. Second differences of U(., y) in x.
  const double h = 2.0 * r / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double y = at(j);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double x = at(i);
      const double mid = U_eval(spec, x, y);
      const double second = U_eval(spec, x - h, y) - 2.0 * mid + U_eval(spec, x + h, y);
      const double scale = std::max({1.0, std::abs(mid), std::abs(U_dx(spec, y) * h)});
      record(out.concavity, std::abs(second) / scale, x, y);
      ++out.concavity.points_checked;
    }
  }

  finish(out.majorization, tol);
  finish(out.initial, tol);
  finish(out.maximal, tol);
  finish(out.concavity, 1e-12);
  return out;
}

namespace {

double central_derivative(const RealFn& f, double x) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double locate_tangency(const RealFn& slope_gap, double lo, double hi,
                       const char* side) {
  try {
    const Bracket bracket = Bracket::make(slope_gap, lo, hi);
    const double tol = 1e-13 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return solve_bracketed(slope_gap, bracket, tol).root;
  } catch (const BracketError&) {
    throw StructuralError(std::string("tangency point not found ") + side +
                          " of the convex interval");
  }
}

}  // namespace

DoubleTangentReport check_double_tangent(const RealFn& v, const RealFn& u,
                                         double a, double b, double tol) {
  if (!(a <= b)) throw DomainError("inflection interval needs a <= b");
  const double u0 = u(0.0);
  const double du = u(1.0) - u0;
  const RealFn slope_gap = [&](double x) { return central_derivative(v, x) - du; };

  const double reach = 1e3 * std::max({1.0, std::abs(a), std::abs(b), b - a});
  DoubleTangentReport out{};
  out.left = locate_tangency(slope_gap, a - reach, a, "left");
  out.right = locate_tangency(slope_gap, b, b + reach, "right");
  if (!(out.right - out.left > tol * std::max(1.0, std::abs(out.left)))) {
    throw StructuralError("tangency points coincide; a double tangent needs two");
  }

  for (double x : {out.left, out.right}) {
    out.tangency_error = std::max({out.tangency_error, std::abs(v(x) - u(x)),
                                   std::abs(slope_gap(x))});
  }

  out.majorant = empty_report();
  const double span = out.right - out.left;
  const double lo = out.left - 2.0 * span;
  const double hi = out.right + 2.0 * span;
  constexpr std::size_t kPoints = 20001;
  for (std::size_t i = 0; i < kPoints; ++i) {
    const double x = kernels::grid_point(lo, hi, kPoints, i);
    record(out.majorant, v(x) - u(x), x, 1.0);
    ++out.majorant.points_checked;
  }
  finish(out.majorant, tol);
  out.passed = out.majorant.passed && out.tangency_error <= tol;
  return out;
}

std::array<double, 2> inflection_interval(const SpecialFnSpec& spec) {
  const double p = spec.params.p;
  const double l = effective_lambda(spec);
  if (!(l > 0.0) || p == 2.0 || !(spec.c_pow_p > 1.0)) {
    throw DomainError("inflection interval needs lambda > 0, p != 2 and C^p > 1");
  }
  if (p > 2.0) {
    // V'' > 0 where |x - lambda| > K |x|.
    const double k = std::pow(spec.c_pow_p, 1.0 / (p - 2.0));
    return {l / (1.0 - k), l / (1.0 + k)};
  }
  // V'' > 0 where |x| > K |x - lambda|.
  const double k = std::pow(spec.c_pow_p, 1.0 / (2.0 - p));
  return {l * k / (k + 1.0), l * k / (k - 1.0)};
}

}  // namespace hardynorm
