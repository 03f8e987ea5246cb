#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hardynorm/errors.hpp"
#include "hardynorm/numerics.hpp"

using namespace hardynorm;

TEST(Bracket, RejectsMissingSignChange) {
  auto f = [](double x) { return x * x + 1.0; };
  EXPECT_THROW(Bracket::make(f, -1.0, 1.0), BracketError);
  EXPECT_THROW(Bracket::make(f, 1.0, -1.0), BracketError);
}

TEST(Bracket, ValidWhenSignsDiffer) {
  const auto b = Bracket::make([](double x) { return x; }, -1.0, 2.0);
  EXPECT_TRUE(b.valid());
  EXPECT_DOUBLE_EQ(b.f_lo, -1.0);
}

TEST(SolveBracketed, SquareRootOfTwo) {
  auto f = [](double x) { return x * x - 2.0; };
  const auto r = solve_bracketed(f, Bracket::make(f, 0.0, 2.0), 1e-14);
  EXPECT_NEAR(r.root, std::sqrt(2.0), 1e-13);
  EXPECT_LE(r.hi - r.lo, 1e-14);
  EXPECT_LE(f(r.lo) * f(r.hi), 0.0);
}

TEST(SolveBracketed, FixedPointOfCosine) {
  auto f = [](double x) { return std::cos(x) - x; };
  EXPECT_NEAR(find_root_bracketed(f, Bracket::make(f, 0.0, 1.0), 1e-14),
              0.7390851332151607, 1e-13);
}

TEST(SolveBracketed, SteepFunctionStaysBracketed) {
  auto f = [](double x) { return std::tanh(50.0 * (x - 0.3)); };
  const auto r = solve_bracketed(f, Bracket::make(f, -5.0, 5.0), 1e-12);
  EXPECT_NEAR(r.root, 0.3, 1e-11);
}

TEST(SolveBracketed, ExhaustedBudgetReportsBestEstimate) {
  auto f = [](double x) { return x * x * x - 0.5; };
  try {
    solve_bracketed(f, Bracket::make(f, 0.0, 1.0), 1e-15, 2);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.best_estimate(), 0.0);
    EXPECT_LT(e.best_estimate(), 1.0);
  }
}

TEST(Integrate, InverseSquareRootSingularity) {
  auto r = integrate([](double t) { return 1.0 / std::sqrt(t); }, 0.0, 1.0,
                     {1e-12, 1e-12, 4000, 1000});
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Integrate, StrongEndpointSingularity) {
  QuadOptions opts;
  opts.abs_tol = 1e-300;
  opts.rel_tol = 1e-10;
  auto r = integrate([](double t) { return std::pow(t, -0.9); }, 0.0, 1.0, opts);
  EXPECT_NEAR(r.value, 10.0, 1e-7);
}

TEST(Integrate, SmoothIntegrand) {
  EXPECT_NEAR(integrate_adaptive([](double t) { return std::sin(t); }, 0.0,
                                 std::numbers::pi, 1e-12),
              2.0, 1e-11);
}

TEST(Integrate, RejectsEmptyInterval) {
  EXPECT_THROW(integrate([](double) { return 1.0; }, 1.0, 1.0), DomainError);
}

TEST(Integrate, BudgetExhaustionThrows) {
  QuadOptions opts;
  opts.abs_tol = 1e-14;
  opts.max_intervals = 3;
  EXPECT_THROW(integrate([](double t) { return std::sin(1.0 / (t + 1e-3)); }, 0.0, 1.0, opts),
               ConvergenceError);
}

TEST(OptConfig, ValidatesCountsAndTolerances) {
  OptConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.starts = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = {};
  cfg.f_tol = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(SplitRegion, MapsOntoFeasibleSet) {
  const SplitRegion region{0.5};
  const auto x = region.to_point(0.0, std::log(2.0));
  EXPECT_DOUBLE_EQ(x[0], -0.5);
  EXPECT_DOUBLE_EQ(x[1], 2.5);
  EXPECT_TRUE(region.contains(x[0], x[1]));
  EXPECT_FALSE(region.contains(0.5, 1.0));
}

TEST(Maximize2d, FindsConcaveMaximum) {
  auto f = [](double a, double b) { return -(a - 1.0) * (a - 1.0) - (b - 3.0) * (b - 3.0); };
  const auto r = maximize_2d(f, SplitRegion{2.0}, OptConfig{});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.argmax[0], 1.0, 1e-6);
  EXPECT_NEAR(r.argmax[1], 3.0, 1e-6);
  EXPECT_NEAR(r.value, 0.0, 1e-11);
}

TEST(Maximize2d, SeedDeterministic) {
  auto f = [](double a, double b) { return std::sin(a) * std::cos(b) - 0.01 * (a * a + b * b); };
  OptConfig cfg;
  cfg.seed = 7;
  const auto r1 = maximize_2d(f, SplitRegion{0.0}, cfg);
  const auto r2 = maximize_2d(f, SplitRegion{0.0}, cfg);
  EXPECT_EQ(r1.argmax, r2.argmax);
  EXPECT_EQ(r1.value, r2.value);
}

TEST(Maximize2d, NonFiniteValuesAreAvoided) {
  auto f = [](double a, double b) {
    if (b > 4.0) return std::numeric_limits<double>::quiet_NaN();
    return -(a + 1.0) * (a + 1.0) - (b - 2.0) * (b - 2.0);
  };
  const auto r = maximize_2d(f, SplitRegion{0.0}, OptConfig{});
  EXPECT_NEAR(r.argmax[0], -1.0, 1e-6);
  EXPECT_NEAR(r.argmax[1], 2.0, 1e-6);
}

TEST(MaximizeScanGolden, SineOnInterval) {
  const auto r = maximize_scan_golden([](double x) { return std::sin(x); }, 0.0, 3.0, 31, 1e-10);
  EXPECT_NEAR(r.argmax, std::numbers::pi / 2.0, 1e-6);
  EXPECT_NEAR(r.value, 1.0, 1e-12);
}

TEST(UnitUniform, RangeAndReproducibility) {
  std::mt19937_64 a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = unit_uniform(a);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_EQ(u, unit_uniform(b));
  }
}
