#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hardynorm/constants.hpp"
#include "hardynorm/kernels.hpp"

namespace hardynorm {

enum class SpecialBranch {
  mart_m0_l1,
  general_first_case,
  general_second_case,
};

std::string_view to_string(SpecialBranch branch);

/// The pair V(x,y) = |x - lambda y|^p - C^p |x|^p and
/// U(x,y) = slope |y|^(p-2) y (x - gamma y).
///
/// For mart_m0_l1 gamma is (p-1)/p and lambda is 1; otherwise gamma is
/// gamma_{p,m}. slope is negative on every branch; reports use D = -slope.
struct SpecialFnSpec {
  Params params;
  double c_pow_p;
  SpecialBranch branch;
  double slope;
  double gamma;
  /// Tangency points of U(., 1) and V(., 1) for general_second_case.
  std::optional<std::array<double, 2>> anchors;
  std::vector<std::string> warnings;

  double d_coefficient() const noexcept { return -slope; }
};

double V_eval(const SpecialFnSpec& spec, double x, double y);
double U_eval(const SpecialFnSpec& spec, double x, double y);

/// dU/dx, which does not depend on x.
double U_dx(const SpecialFnSpec& spec, double y);

/// Selects and builds the special function:
///  - m = 0, lambda = 1: mart_m0_l1 from alpha_p;
///  - lambda > 2 gamma and V <= U with C = lambda/gamma - 1 tangent at
///    x = gamma on a verification grid: general_first_case;
///  - otherwise general_second_case anchored at the optimizer's argmax.
/// Throws DomainError for lambda <= 0 or p = 2 outside the mart branch, and
/// StructuralError when no interior optimum exists for the second case.
SpecialFnSpec build_special_fn(const Params& params, const OptConfig& cfg = {});

struct ViolationReport {
  double max_violation;
  std::optional<std::array<double, 2>> witness;
  long points_checked;
  bool passed;
};

/// V(x, y) <= U(x, y) + tol on the slices y = 1 and y = -1 over
/// n_points equispaced x in [x_lo, x_hi] (homogeneity covers all other y),
/// plus the sign of the |x|^p coefficient 1 - C^p of V - U.
ViolationReport check_majorization(const SpecialFnSpec& spec, double x_lo,
                                   double x_hi, long n_points, double tol,
                                   kernels::Isa isa = kernels::best_isa());

struct BurkholderGrid {
  double radius = 10.0;
  int n = 401;
};

struct BurkholderReport {
  ViolationReport majorization;
  ViolationReport initial;
  ViolationReport maximal;
  ViolationReport concavity;

  bool passed() const noexcept {
    return majorization.passed && initial.passed && maximal.passed &&
           concavity.passed;
  }
};

/// The four sufficient conditions for the maximal inequality, on
/// [-radius, radius] grids:
///  1. V(x, y) <= U(x, y) for x <= y;
///  2. U(x, x) <= 0;
///  3. U(x + h, max(x + h, y)) <= U(x + h, y) for x <= y;
///  4. U(., y) has vanishing second differences (it is affine).
/// Requires branch mart_m0_l1.
BurkholderReport check_burkholder_conditions(const SpecialFnSpec& spec,
                                             const BurkholderGrid& grid = {},
                                             double tol = 1e-9);

struct DoubleTangentReport {
  double left;
  double right;
  /// Largest of |v - u| and |v' - u'| at the two tangency points.
  double tangency_error;
  /// v <= u + tol on a grid around both tangency points.
  ViolationReport majorant;
  bool passed;
};

/// For affine u and v concave on (-inf, a], convex on [a, b] and concave on
/// [b, inf): locates the tangency points in each concave part by solving
/// v' = u', verifies v = u there and then v <= u on a grid. Throws
/// StructuralError when either tangency point is missing or both coincide.
DoubleTangentReport check_double_tangent(const RealFn& v, const RealFn& u,
                                         double a, double b, double tol);

/// Inflection interval (a, b) of V(., 1), where V is convex. Requires
/// lambda > 0, p != 2 and C^p > 1.
std::array<double, 2> inflection_interval(const SpecialFnSpec& spec);

}  // namespace hardynorm
