#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hardynorm/bellman.hpp"
#include "hardynorm/errors.hpp"
#include "hardynorm/numerics.hpp"

using namespace hardynorm;

namespace {

double numeric_dx(const SpecialFnSpec& spec, double x, double y) {
  const double h = 1e-6 * std::max(1.0, std::abs(x));
  return (V_eval(spec, x + h, y) - V_eval(spec, x - h, y)) / (2.0 * h);
}

}  // namespace

TEST(SpecialFn, MartingaleValues) {
  const auto spec = build_special_fn({4.0, 0.0, 1.0});
  EXPECT_EQ(spec.branch, SpecialBranch::mart_m0_l1);
  EXPECT_NEAR(spec.c_pow_p, 3.0, 1e-10);
  EXPECT_NEAR(spec.slope, -12.0, 1e-8);
  EXPECT_DOUBLE_EQ(spec.gamma, 0.75);
  EXPECT_NEAR(V_eval(spec, -2.0, 1.0), 33.0, 1e-8);
  EXPECT_NEAR(U_eval(spec, -2.0, 1.0), 33.0, 1e-8);
  EXPECT_NEAR(V_eval(spec, 1.0, 1.0), -3.0, 1e-9);
  EXPECT_DOUBLE_EQ(V_eval(spec, 0.0, 0.0), 0.0);
}

TEST(SpecialFn, UVanishesOnZeroSlice) {
  const auto spec = build_special_fn({1.5, 0.0, 1.0});
  for (double x : {-3.0, 0.0, 2.5}) EXPECT_EQ(U_eval(spec, x, 0.0), 0.0);
}

TEST(SpecialFn, UOnDiagonal) {
  for (double p : {1.5, 3.0}) {
    const auto spec = build_special_fn({p, 0.0, 1.0});
    for (double x : {-2.0, 0.5, 3.0}) {
      EXPECT_NEAR(U_eval(spec, x, x), spec.slope * (1.0 - spec.gamma) * std::pow(std::abs(x), p),
                  1e-12 * std::pow(std::abs(x), p) * std::abs(spec.slope));
    }
  }
}

TEST(SpecialFn, DerivativeOfUIsConstantInX) {
  const auto spec = build_special_fn({2.5, 0.0, 1.0});
  for (double y : {-1.5, 0.7}) {
    const double h = 1e-3;
    const double fd = (U_eval(spec, 2.0 + h, y) - U_eval(spec, 2.0 - h, y)) / (2.0 * h);
    EXPECT_NEAR(U_dx(spec, y), fd, 1e-9 * std::abs(fd));
  }
}

TEST(SpecialFn, Homogeneous) {
  std::mt19937_64 rng(21);
  for (const Params& params : {Params{4.0, 0.0, 1.0}, Params{1.5, 1.0, 2.0}, Params{2.5, 0.0, 10.0}}) {
    const auto spec = build_special_fn(params);
    for (int k = 0; k < 50; ++k) {
      const double x = -5.0 + 10.0 * unit_uniform(rng);
      const double y = -5.0 + 10.0 * unit_uniform(rng);
      const double t = (k % 2 ? -1.0 : 1.0) * (0.1 + 3.0 * unit_uniform(rng));
      const double scale = std::pow(std::abs(t), params.p);
      const double v = V_eval(spec, x, y), u = U_eval(spec, x, y);
      ASSERT_NEAR(V_eval(spec, t * x, t * y), scale * v, 1e-10 * scale * (1.0 + std::abs(v)));
      ASSERT_NEAR(U_eval(spec, t * x, t * y), scale * u, 1e-10 * scale * (1.0 + std::abs(u)));
    }
  }
}

TEST(BuildSpecialFn, FirstCaseForLargeLambda) {
  const Params params{2.5, 0.0, 10.0};
  const auto spec = build_special_fn(params);
  ASSERT_EQ(spec.branch, SpecialBranch::general_first_case);
  const double g = spec.gamma;
  const double l = params.lambda;
  EXPECT_NEAR(std::pow(spec.c_pow_p, 1.0 / params.p), l / g - 1.0, 1e-12 * l);
  EXPECT_NEAR(spec.slope, -params.p * std::pow(l - g, params.p - 1.0) * l / g,
              1e-12 * std::abs(spec.slope));
  EXPECT_LT(spec.slope, 0.0);
  // Tangent at x = gamma on y = 1.
  EXPECT_NEAR(V_eval(spec, g, 1.0), U_eval(spec, g, 1.0), 1e-9 * std::pow(l, params.p));
  EXPECT_NEAR(numeric_dx(spec, g, 1.0), spec.slope, 1e-5 * std::abs(spec.slope));
}

TEST(BuildSpecialFn, SecondCaseAnchorsAreTangencies) {
  const Params params{1.5, 1.0, 2.0};
  const auto spec = build_special_fn(params);
  ASSERT_EQ(spec.branch, SpecialBranch::general_second_case);
  ASSERT_TRUE(spec.anchors.has_value());
  const auto [a, b] = *spec.anchors;
  EXPECT_NEAR(a, 0.4, 0.1);
  EXPECT_NEAR(b, 5.7, 0.5);
  EXPECT_NEAR(spec.c_pow_p, 1.81442, 1e-5);
  EXPECT_LT(spec.slope, 0.0);
  const double sv = std::max(1.0, std::abs(V_eval(spec, b, 1.0)));
  EXPECT_NEAR(V_eval(spec, a, 1.0), U_eval(spec, a, 1.0), 1e-9 * sv);
  EXPECT_NEAR(V_eval(spec, b, 1.0), U_eval(spec, b, 1.0), 1e-9 * sv);
}

TEST(BuildSpecialFn, RejectsUnsupportedParameters) {
  EXPECT_THROW(build_special_fn({3.0, 0.5, 0.0}), DomainError);
  EXPECT_THROW(build_special_fn({3.0, 0.5, -1.0}), DomainError);
  EXPECT_THROW(build_special_fn({2.0, 0.5, 1.0}), DomainError);
  EXPECT_THROW(build_special_fn({0.5, 0.0, 1.0}), DomainError);
}

TEST(BuildSpecialFn, BranchNames) {
  EXPECT_EQ(to_string(SpecialBranch::mart_m0_l1), "mart_m0_l1");
  EXPECT_EQ(to_string(SpecialBranch::general_second_case), "general_second_case");
}

TEST(Majorization, HoldsOnEveryBranch) {
  for (const Params& params : {Params{1.5, 0.0, 1.0}, Params{4.0, 0.0, 1.0}, Params{1.5, 1.0, 2.0},
                               Params{2.5, 0.0, 10.0}, Params{3.0, 1.0, 2.0}}) {
    const auto spec = build_special_fn(params);
    const double tol = 1e-9 * std::max(1.0, std::pow(params.lambda, params.p));
    const auto r = check_majorization(spec, -50.0, 50.0, 100001, tol);
    EXPECT_TRUE(r.passed) << params.p << " " << params.m << " " << params.lambda << " max "
                          << r.max_violation;
    EXPECT_EQ(r.points_checked, 200002);
  }
}

TEST(Majorization, TooSmallConstantGivesWitness) {
  auto spec = build_special_fn({4.0, 0.0, 1.0});
  spec.c_pow_p = 2.0;
  const auto r = check_majorization(spec, -10.0, 10.0, 20001, 1e-9);
  EXPECT_FALSE(r.passed);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_GT(r.max_violation, 0.0);
  const auto [x, y] = *r.witness;
  EXPECT_GT(V_eval(spec, x, y), U_eval(spec, x, y));
}

TEST(Majorization, ScalarAndVectorAgree) {
  if (!kernels::isa_available(kernels::Isa::avx2)) GTEST_SKIP() << "AVX2 not available";
  const auto spec = build_special_fn({1.5, 1.0, 2.0});
  const auto s = check_majorization(spec, -20.0, 20.0, 40001, 1e-9, kernels::Isa::scalar);
  const auto a = check_majorization(spec, -20.0, 20.0, 40001, 1e-9, kernels::Isa::avx2);
  EXPECT_NEAR(s.max_violation, a.max_violation, 1e-12);
  EXPECT_EQ(s.passed, a.passed);
}

TEST(Burkholder, ConditionsHold) {
  for (double p : {1.5, 4.0}) {
    const auto spec = build_special_fn({p, 0.0, 1.0});
    const auto r = check_burkholder_conditions(spec);
    EXPECT_TRUE(r.majorization.passed) << p << " " << r.majorization.max_violation;
    EXPECT_TRUE(r.initial.passed) << p;
    EXPECT_TRUE(r.maximal.passed) << p << " " << r.maximal.max_violation;
    EXPECT_TRUE(r.concavity.passed) << p;
    EXPECT_TRUE(r.passed());
  }
}

TEST(Burkholder, RequiresMartingaleBranch) {
  const auto spec = build_special_fn({1.5, 1.0, 2.0});
  EXPECT_THROW(check_burkholder_conditions(spec), DomainError);
}

TEST(InflectionInterval, QuarticOracle) {
  const auto spec = build_special_fn({4.0, 0.0, 1.0});
  const auto [a, b] = inflection_interval(spec);
  const double k = std::sqrt(3.0);
  EXPECT_NEAR(a, 1.0 / (1.0 - k), 1e-9);
  EXPECT_NEAR(b, 1.0 / (1.0 + k), 1e-9);
}

TEST(InflectionInterval, SecondDerivativeChangesSign) {
  for (const Params& params : {Params{4.0, 0.0, 1.0}, Params{1.5, 1.0, 2.0}, Params{3.0, 1.0, 2.0}}) {
    const auto spec = build_special_fn(params);
    const auto [a, b] = inflection_interval(spec);
    auto second = [&](double x) {
      const double h = 1e-4 * std::max(1.0, std::abs(x));
      return (V_eval(spec, x + h, 1.0) - 2.0 * V_eval(spec, x, 1.0) + V_eval(spec, x - h, 1.0)) / (h * h);
    };
    const double mid = 0.5 * (a + b);
    if (mid != 0.0 && mid != params.lambda) EXPECT_GT(second(mid), 0.0) << params.p;
    EXPECT_LT(second(a - 0.5 * (b - a)), 0.0) << params.p;
    EXPECT_LT(second(b + 0.5 * (b - a)), 0.0) << params.p;
  }
}

TEST(DoubleTangent, MartingaleQuartic) {
  const auto spec = build_special_fn({4.0, 0.0, 1.0});
  const auto [a, b] = inflection_interval(spec);
  const auto r = check_double_tangent([&](double x) { return V_eval(spec, x, 1.0); },
                                      [&](double x) { return U_eval(spec, x, 1.0); }, a, b, 1e-7);
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.left, -2.0, 1e-6);
  EXPECT_NEAR(r.right, 1.0, 1e-6);
}

TEST(DoubleTangent, SecondCaseAnchors) {
  const auto spec = build_special_fn({1.5, 1.0, 2.0});
  const auto [a, b] = inflection_interval(spec);
  const auto r = check_double_tangent([&](double x) { return V_eval(spec, x, 1.0); },
                                      [&](double x) { return U_eval(spec, x, 1.0); }, a, b, 1e-7);
  EXPECT_TRUE(r.passed) << r.tangency_error;
  EXPECT_NEAR(r.left, (*spec.anchors)[0], 1e-4);
  EXPECT_NEAR(r.right, (*spec.anchors)[1], 1e-3);
}

TEST(DoubleTangent, MissingTangencyIsStructural) {
  EXPECT_THROW(check_double_tangent([](double x) { return -x * x; }, [](double) { return 1.0; },
                                    -1.0, 1.0, 1e-9),
               StructuralError);
}
