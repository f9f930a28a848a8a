#include <gtest/gtest.h>

#include <cmath>

#include "passk/error.hpp"
#include "passk/evaluation.hpp"
#include "passk/serialize.hpp"

using namespace passk;

namespace {

PassCurve curve(std::vector<CurvePoint> pts) {
  PassCurve c;
  c.points = std::move(pts);
  return c;
}

SyntheticInput half_easy() { return {PointMixture{{{0.3, 0.5}, {0.0, 0.5}}}, 100}; }

}  // namespace

TEST(Evaluation, MseExamples) {
  EXPECT_EQ(mse(curve({{1, 0.4}, {2, 0.6}}), curve({{1, 0.4}, {2, 0.6}})), 0.0);
  EXPECT_NEAR(mse(curve({{1, 0.5}, {2, 0.5}}), curve({{1, 0.6}, {2, 0.8}})), 0.05, 1e-15);
  EXPECT_NEAR(mse(curve({{5, 0.5}}), curve({{5, 0.4}})), 0.01, 1e-15);
  EXPECT_THROW(mse(curve({{1, 0.5}}), curve({{2, 0.5}})), std::invalid_argument);
}

TEST(Evaluation, Quantile) {
  std::vector<double> v = {4, 1, 3, 2, 5};
  EXPECT_EQ(quantile(v, 0.0), 1.0);
  EXPECT_EQ(quantile(v, 0.5), 3.0);
  EXPECT_EQ(quantile(v, 1.0), 5.0);
  EXPECT_NEAR(quantile(v, 0.1), 1.4, 1e-14);
}

TEST(Evaluation, MethodTags) {
  auto methods = all_methods();
  ASSERT_EQ(methods.size(), 4u);
  for (const auto& m : methods) EXPECT_EQ(parse_method(method_tag(m)), m);
  EXPECT_FALSE(parse_method("bogus").has_value());
  EXPECT_EQ(method_tag({Sampling::dynamic, Fitter::beta_binomial}), "dynamic-beta-binomial");
  EXPECT_EQ(parse_fitter("discretized-beta"), Fitter::discretized_beta);
}

TEST(Evaluation, LogSpaced) {
  auto ks = default_ks();
  EXPECT_EQ(ks.size(), 25u);
  EXPECT_EQ(ks.front(), 100);
  EXPECT_EQ(ks.back(), 10000);
  auto few = log_spaced(1, 3, 10);
  EXPECT_EQ(few, (std::vector<std::int64_t>{1, 2, 3}));
}

TEST(Bootstrap, IdenticalProblemsGiveZeroWidth) {
  auto counts = CountsState::uniform(std::vector<std::int64_t>(10, 3), 10);
  Rng rng(1);
  auto ci = bootstrap_ci(counts, Fitter::loglog_regression, 50, {.resamples = 50}, rng);
  EXPECT_EQ(ci.lower, ci.upper);
  EXPECT_EQ(ci.point, ci.lower);
}

TEST(Bootstrap, IntervalContainsPointAndIsOrdered) {
  Rng data(2);
  auto p = sample_difficulties(BetaDifficulty{1, 3}, 200, data);
  auto counts = sample_counts(p, 30, data);
  Rng rng(3);
  auto ci = bootstrap_ci(counts, Fitter::beta_binomial, 100, {.resamples = 100}, rng);
  EXPECT_LE(ci.lower, ci.point);
  EXPECT_LE(ci.point, ci.upper);
  EXPECT_LT(ci.lower, ci.upper);
  EXPECT_EQ(ci.resamples, 100);
  EXPECT_EQ(ci.failures, 0);
}

TEST(Bootstrap, FailsWhenMostResamplesFail) {
  // One problem with successes: most resamples have no successes for theta.
  std::vector<std::int64_t> s(40, 0);
  s[0] = 5;
  auto counts = CountsState::uniform(s, 10);
  Rng rng(4);
  EXPECT_THROW(bootstrap_ci(counts, Fitter::discretized_beta, 10, {.resamples = 50}, rng), Error);
}

TEST(Bootstrap, CoverageOnUniformDifficulties) {
  const std::int64_t k = 10;
  const double truth = 10.0 / 11.0;
  int covered = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng data(derive_seed(77, rep));
    auto p = sample_difficulties(UniformDifficulty{0, 1}, 300, data);
    auto counts = sample_counts(p, 20, data);
    Rng rng(derive_seed(78, rep));
    auto ci = bootstrap_ci(counts, Fitter::beta_binomial, k, {.resamples = 100}, rng);
    covered += ci.lower <= truth && truth <= ci.upper;
  }
  EXPECT_GE(covered, 90);
}

TEST(Grid, CompleteAndDeterministic) {
  GridOptions opts;
  opts.budgets = {200, 1000};
  opts.ks = {100, 1000};
  opts.seed = 5;
  auto a = run_grid(half_easy(), opts);
  opts.threads = 3;
  auto b = run_grid(half_easy(), opts);
  ASSERT_EQ(a.cells.size(), 2u * 2u * 4u);
  Provenance prov{"test", 5};
  EXPECT_EQ(to_csv(a, prov), to_csv(b, prov));
  for (const auto& c : a.cells) {
    EXPECT_GE(c.truth, 0.0);
    EXPECT_LE(c.truth, 1.0);
    if (c.ok()) {
      EXPECT_GE(c.prediction, 0.0);
      EXPECT_LE(c.prediction, 1.0);
      EXPECT_NEAR(c.squared_error, (c.prediction - c.truth) * (c.prediction - c.truth), 1e-15);
    } else {
      EXPECT_TRUE(std::isnan(c.prediction));
    }
  }
}

TEST(Grid, SimulateReproducesCell) {
  GridOptions opts;
  opts.budgets = {500};
  opts.ks = {1000};
  opts.seed = 9;
  auto grid = run_grid(half_easy(), opts);
  for (const auto& m : all_methods()) {
    auto sim = simulate(half_easy(), m, 500, 1000, 9);
    const auto& cell = grid.cell(500, 1000, method_tag(m));
    EXPECT_EQ(sim.prediction, cell.prediction) << method_tag(m);
    EXPECT_EQ(sim.truth, cell.truth);
  }
}

TEST(Grid, RecordsRegressionFailureInCell) {
  GridOptions opts;
  opts.budgets = {100};
  opts.ks = {100};
  opts.methods = {{Sampling::uniform, Fitter::loglog_regression}};
  auto grid = run_grid(SyntheticInput{PointMixture{{{0.0, 1.0}}}, 50}, opts);
  ASSERT_EQ(grid.cells.size(), 1u);
  EXPECT_FALSE(grid.cells[0].ok());
  EXPECT_TRUE(std::isnan(grid.cells[0].prediction));
}

TEST(Grid, SaturatedBudgetMatchesFullDataFit) {
  Rng rng(12);
  auto p = sample_difficulties(BetaDifficulty{1, 4}, 30, rng);
  auto pools = sample_pools(p, 200, rng);
  GridOptions opts;
  opts.budgets = {30 * 200};
  opts.ks = {100};
  opts.methods = {{Sampling::dynamic, Fitter::beta_binomial}};
  opts.seed = 1;
  auto grid = run_grid(pools, opts);
  auto full = fit_beta_binomial(full_counts(pools));
  auto truth = ground_truth_curve(pools, opts.ks).points[0].value;
  const double expected = predict_pass_at_k(full, 100) - truth;
  ASSERT_TRUE(grid.cells[0].ok()) << grid.cells[0].error_note;
  EXPECT_NEAR(grid.cells[0].squared_error, expected * expected, 1e-12);
}

TEST(Grid, ErrorShrinksWithBudget) {
  SyntheticInput input{BetaDifficulty{1.5, 4}, 100};
  std::vector<double> mean_mse;
  for (std::int64_t budget : {100, 1000, 10000}) {
    double total = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
      total += simulate(input, {Sampling::uniform, Fitter::beta_binomial}, budget, 1000, seed).squared_error;
    mean_mse.push_back(total / 20);
  }
  EXPECT_LE(mean_mse[1], 1.1 * mean_mse[0]);
  EXPECT_LE(mean_mse[2], 1.1 * mean_mse[1]);
}
