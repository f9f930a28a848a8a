#include <benchmark/benchmark.h>

#include "passk/allocation.hpp"
#include "passk/distribution_fit.hpp"
#include "passk/estimators.hpp"
#include "passk/evaluation.hpp"
#include "passk/synthetic.hpp"

using namespace passk;

namespace {

CountsState beta_counts(std::size_t m, std::int64_t b) {
  Rng rng(1);
  auto p = sample_difficulties(BetaDifficulty{0.8, 3.0}, m, rng);
  return sample_counts(p, b, rng);
}

void BM_PassAtK(benchmark::State& state) {
  const auto b = state.range(0);
  for (auto _ : state) {
    double acc = 0.0;
    for (std::int64_t k = 1; k <= b; k += b / 64 + 1) acc += pass_at_k_unbiased(b, b / 10, k);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_PassAtK)->Arg(100)->Arg(10000);

void BM_BetaBinomialLogLikelihood(benchmark::State& state) {
  const auto counts = beta_counts(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(beta_binomial_log_likelihood(counts, 0.8, 3.0));
}
BENCHMARK(BM_BetaBinomialLogLikelihood)->Arg(100)->Arg(10000);

void BM_FitBetaBinomial(benchmark::State& state) {
  const auto counts = beta_counts(static_cast<std::size_t>(state.range(0)), 50);
  for (auto _ : state) benchmark::DoNotOptimize(fit_beta_binomial(counts));
}
BENCHMARK(BM_FitBetaBinomial)->Arg(100)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_FitDiscretizedBeta(benchmark::State& state) {
  const auto counts = beta_counts(static_cast<std::size_t>(state.range(0)), 100);
  for (auto _ : state) benchmark::DoNotOptimize(fit_discretized_beta(counts));
}
BENCHMARK(BM_FitDiscretizedBeta)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ScaledLikelihood(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(scaled_beta_binomial_log_likelihood(15, 4, 2.0, 0.5, 0.9));
}
BENCHMARK(BM_ScaledLikelihood);

void BM_PredictQuadrature(benchmark::State& state) {
  BetaParams params;
  params.alpha = 0.7;
  params.beta = 2.0;
  params.theta = 0.8;
  for (auto _ : state) benchmark::DoNotOptimize(predict_pass_at_k(params, 1000));
}
BENCHMARK(BM_PredictQuadrature);

void BM_DynamicSampling(benchmark::State& state) {
  Rng prng(2);
  auto p = sample_difficulties(UniformDifficulty{0.0, 0.5}, 100, prng);
  for (auto _ : state) {
    SyntheticSource source(p, 3);
    Rng rng(4);
    benchmark::DoNotOptimize(run_dynamic_sampling(source, state.range(0), rng));
  }
}
BENCHMARK(BM_DynamicSampling)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_SyntheticGrid(benchmark::State& state) {
  const SyntheticInput input{PointMixture{{{0.3, 0.5}, {0.0, 0.5}}}, 100};
  GridOptions options;
  options.budgets = {500, 1000, 2000};
  options.ks = default_ks();
  options.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_grid(input, options));
}
BENCHMARK(BM_SyntheticGrid)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
