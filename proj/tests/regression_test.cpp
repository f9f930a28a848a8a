#include <gtest/gtest.h>

#include <cmath>

#include "passk/random.hpp"
#include "passk/regression.hpp"
#include "passk/synthetic.hpp"

using namespace passk;

TEST(Regression, TwoPointExample) {
  PassCurve curve;
  curve.points = {{1, 0.8}, {10, 0.5}};
  auto fit = fit_loglog(curve);
  EXPECT_NEAR(fit.intercept, -std::log(0.8), 1e-12);
  EXPECT_NEAR(fit.slope, (std::log(0.8) - std::log(0.5)) / std::log(10.0), 1e-12);
  EXPECT_NEAR(predict_power_law(fit, 100), 0.3125, 1e-12);
  EXPECT_EQ(fit.points_used, 2u);
}

TEST(Regression, RecoversExactPowerLaw) {
  // -log pass = a log k + c, i.e. pass = exp(-c) k^-a.
  const double a = 0.35;
  const double c = 0.9;
  PassCurve curve;
  for (std::int64_t k = 1; k <= 50; ++k) curve.points.push_back({k, std::exp(-c) * std::pow(k, -a)});
  auto fit = fit_loglog(curve);
  EXPECT_NEAR(fit.slope, a, 1e-9);
  EXPECT_NEAR(fit.intercept, c, 1e-9);
  EXPECT_LT(fit.residual_sum_squares, 1e-20);
}

TEST(Regression, ExcludesZerosAndNeedsTwoPoints) {
  PassCurve curve;
  curve.points = {{1, 0.0}, {2, 0.0}, {3, 0.5}};
  EXPECT_THROW(fit_loglog(curve), std::invalid_argument);
  curve.points.push_back({4, 0.6});
  auto fit = fit_loglog(curve);
  EXPECT_EQ(fit.zeros_excluded, 2u);
  EXPECT_EQ(fit.points_used, 2u);
}

TEST(Regression, ClipsToOne) {
  PowerLawFit fit;
  fit.slope = -0.1;
  fit.intercept = 0.1;
  EXPECT_GT(power_law_value(fit, 10000), 1.0);
  EXPECT_EQ(predict_power_law(fit, 10000), 1.0);
}

TEST(Regression, FitKs) {
  auto small = regression_ks(10);
  ASSERT_EQ(small.size(), 10u);
  EXPECT_EQ(small.front(), 1);
  EXPECT_EQ(small.back(), 10);
  auto large = regression_ks(10000);
  ASSERT_EQ(large.size(), 64u);
  EXPECT_EQ(large.front(), 1);
  EXPECT_EQ(large.back(), 10000);
  for (std::size_t i = 1; i < large.size(); ++i) EXPECT_LT(large[i - 1], large[i]);
}

TEST(Regression, DivergesOnHalfImpossibleData) {
  Rng rng(4);
  std::vector<double> p(100);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = i % 2 == 0 ? 0.3 : 0.0;
  auto counts = sample_counts(p, 100, rng);
  auto fit = fit_regression_baseline(counts);
  bool exceeded = false;
  for (std::int64_t k = 100; k <= 10000; k += 100) exceeded |= power_law_value(fit, k) > 1.0;
  EXPECT_TRUE(exceeded);
}
