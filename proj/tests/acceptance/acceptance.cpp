// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "passk/allocation.hpp"
#include "passk/distribution_fit.hpp"
#include "passk/estimators.hpp"
#include "passk/evaluation.hpp"
#include "passk/regression.hpp"
#include "passk/synthetic.hpp"

using namespace passk;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

constexpr std::uint64_t kSeed = 20240611;

// -- 1 -----------------------------------------------------------------------
Verdict estimator_oracle() {
  double worst_direct = 0.0;
  double worst_recurrence = 0.0;
  for (std::int64_t b = 1; b <= 20; ++b)
    for (std::int64_t s = 0; s <= b; ++s)
      for (std::int64_t k = 1; k <= b; ++k) {
        const double got = pass_at_k_unbiased(b, s, k);
        worst_direct = std::max(worst_direct, std::abs(got - static_cast<double>(oracle::exact_pass_at_k(b, s, k))));
        // pass@k = pass@l + sum_{j=l}^{k-1} s C(b-s, j) / ((b-j) C(b, j)), for every l <= k.
        for (std::int64_t l = 1; l <= k; ++l) {
          long double rhs = pass_at_k_unbiased(b, s, l);
          for (std::int64_t j = l; j < k; ++j) {
            rhs += static_cast<long double>(s) * oracle::choose(b - s, j) /
                   (static_cast<long double>(b - j) * oracle::choose(b, j));
          }
          worst_recurrence = std::max(worst_recurrence, std::abs(got - static_cast<double>(rhs)));
        }
      }
  return {worst_direct <= 1e-10 && worst_recurrence <= 1e-10,
          "max |direct error| " + fmt(worst_direct) + ", max |recurrence error| " + fmt(worst_recurrence)};
}

// -- 2 -----------------------------------------------------------------------
Verdict variance_formulas() {
  const double p = 0.3;
  const std::int64_t b = 20;
  Rng rng(derive_seed(kSeed, "variance"));
  std::binomial_distribution<std::int64_t> draw(b, p);
  std::vector<double> at_b;
  std::vector<double> at_1;
  at_b.reserve(100000);
  at_1.reserve(100000);
  for (int r = 0; r < 100000; ++r) {
    const auto s = draw(rng);
    at_b.push_back(pass_at_k_unbiased(b, s, b));
    at_1.push_back(pass_at_k_unbiased(b, s, 1));
  }
  const auto mb = oracle::moments(at_b);
  const auto m1 = oracle::moments(at_1);
  const double q = std::pow(1.0 - p, static_cast<double>(b));
  const double expect_b = q - q * q;
  const double expect_1 = p * (1.0 - p) / static_cast<double>(b);
  const double z_b = (mb.variance - expect_b) / mb.variance_se;
  const double z_1 = (m1.variance - expect_1) / m1.variance_se;
  return {std::abs(z_b) <= 3.0 && std::abs(z_1) <= 3.0,
          "k=b: " + fmt(mb.variance) + " vs " + fmt(expect_b) + " (z=" + fmt(z_b) + "); k=1: " + fmt(m1.variance) +
              " vs " + fmt(expect_1) + " (z=" + fmt(z_1) + ")"};
}

// Shared by criteria 3 and 4.
CountsState uniform_difficulty_counts() {
  Rng rng(derive_seed(kSeed, "uniform-data"));
  const auto p = sample_difficulties(UniformDifficulty{0.0, 1.0}, 10000, rng);
  return sample_counts(p, 100, rng);
}

// -- 3 -----------------------------------------------------------------------
Verdict beta_binomial_recovery() {
  Rng rng(derive_seed(kSeed, "beta-2-5"));
  const auto p = sample_difficulties(BetaDifficulty{2.0, 5.0}, 5000, rng);
  const auto fit25 = fit_beta_binomial(sample_counts(p, 50, rng));
  const bool ok25 = std::abs(fit25.alpha - 2.0) <= 0.2 && std::abs(fit25.beta - 5.0) <= 0.5;

  const auto fit_u = fit_beta_binomial(uniform_difficulty_counts());
  bool ok_u = fit_u.alpha >= 0.9 && fit_u.alpha <= 1.1 && fit_u.beta >= 0.9 && fit_u.beta <= 1.1;
  double worst = 0.0;
  for (std::int64_t k : {10, 100, 1000}) {
    worst = std::max(worst, std::abs(predict_pass_at_k(fit_u, k) - static_cast<double>(k) / (k + 1.0)));
  }
  ok_u = ok_u && worst <= 0.01;
  return {ok25 && ok_u, "Beta(2,5) -> (" + fmt(fit25.alpha) + ", " + fmt(fit25.beta) + "); uniform -> (" +
                            fmt(fit_u.alpha) + ", " + fmt(fit_u.beta) + "), max |pass@k - k/(k+1)| " + fmt(worst)};
}

// -- 4 -----------------------------------------------------------------------
Verdict discretized_bias() {
  const auto counts = uniform_difficulty_counts();
  const auto disc = fit_discretized_beta(counts);
  const auto bb = fit_beta_binomial(counts);
  const double cdf = scaled_beta_cdf(disc, 0.1);
  const double disc_1000 = predict_pass_at_k(disc, 1000);
  const double bb_1000 = predict_pass_at_k(bb, 1000);
  return {cdf - 0.1 >= 0.02 && disc_1000 < bb_1000,
          "CDF(0.1)=" + fmt(cdf) + " (theta=" + fmt(disc.theta) + "); pass@1000 discretized " + fmt(disc_1000) +
              " vs beta-binomial " + fmt(bb_1000)};
}

// -- 5 -----------------------------------------------------------------------
Verdict dynamic_vs_uniform() {
  const SyntheticInput input{PointMixture{{{0.3, 0.5}, {0.0, 0.5}}}, 100};
  const Method dynamic{Sampling::dynamic, Fitter::beta_binomial};
  const Method uniform{Sampling::uniform, Fitter::beta_binomial};
  bool ok = true;
  std::string detail;
  for (std::int64_t budget : {500, 1000, 2000}) {
    double mse_d = 0.0;
    double mse_u = 0.0;
    double mean_u = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto d = simulate(input, dynamic, budget, 1000, seed);
      const auto u = simulate(input, uniform, budget, 1000, seed);
      mse_d += d.squared_error / 20.0;
      mse_u += u.squared_error / 20.0;
      mean_u += u.prediction / 20.0;
    }
    ok = ok && mse_d < mse_u;
    if (budget == 500) ok = ok && mean_u > 0.5;
    detail += "B=" + std::to_string(budget) + ": " + fmt(mse_d) + " < " + fmt(mse_u);
    if (budget == 500) detail += " (uniform mean " + fmt(mean_u) + ")";
    if (budget != 2000) detail += "; ";
  }
  return {ok, detail};
}

// -- 6 -----------------------------------------------------------------------
Verdict oracle_allocation() {
  const std::vector<double> p = {0.1, 0.5};
  const std::int64_t k = 10;
  const double total = 600.0;
  const auto plan = oracle_optimal_allocation(p, k, total);

  double share_error = 0.0;
  double wsum = 0.0;
  std::vector<double> w;
  for (double pi : p) {
    w.push_back(std::sqrt(pi * std::pow(1.0 - pi, 2.0 * static_cast<double>(k) - 1.0)));
    wsum += w.back();
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    share_error = std::max(share_error, std::abs(plan.budgets[i] / total - w[i] / wsum));
  }

  auto variance_of = [&](const std::vector<std::int64_t>& budgets, std::string_view tag) {
    Rng rng(derive_seed(kSeed, tag));
    std::vector<double> estimates;
    estimates.reserve(20000);
    for (int r = 0; r < 20000; ++r) {
      std::vector<std::int64_t> s;
      for (std::size_t i = 0; i < p.size(); ++i) {
        std::binomial_distribution<std::int64_t> draw(budgets[i], p[i]);
        s.push_back(draw(rng));
      }
      estimates.push_back(frequentist_pass_at_k(CountsState({"a", "b"}, s, budgets), k));
    }
    return oracle::moments(estimates);
  };
  const auto oracle_budgets = plan.rounded();
  const auto vo = variance_of(oracle_budgets, "oracle-allocation");
  const auto vu = variance_of({300, 300}, "uniform-allocation");
  const double margin = 3.0 * std::hypot(vo.variance_se, vu.variance_se);
  return {vo.variance <= vu.variance + margin && share_error <= 1e-12,
          "budgets (" + std::to_string(oracle_budgets[0]) + ", " + std::to_string(oracle_budgets[1]) +
              "), variance oracle " + fmt(vo.variance) + " vs uniform " + fmt(vu.variance) + " (3 SE = " +
              fmt(margin) + "); share error " + fmt(share_error)};
}

// -- 7 -----------------------------------------------------------------------
Verdict scaled_likelihood() {
  double worst_rel = 0.0;
  double worst_reduction = 0.0;
  for (std::int64_t b = 0; b <= 15; ++b)
    for (std::int64_t s = 0; s <= b; ++s)
      for (double theta : {0.3, 0.5, 0.9, 1.0})
        for (double a : {0.5, 1.0, 2.0})
          for (double bb : {0.5, 1.0, 2.0}) {
            const double ref = oracle::scaled_beta_binomial_probability(b, s, a, bb, theta);
            const double got = std::exp(scaled_beta_binomial_log_likelihood(b, s, a, bb, theta));
            worst_rel = std::max(worst_rel, std::abs(got - ref) / ref);
            if (theta == 1.0) {
              const auto counts = CountsState::uniform(std::vector<std::int64_t>{s}, b);
              worst_reduction = std::max(worst_reduction, std::abs(scaled_beta_binomial_log_likelihood(b, s, a, bb, 1.0) -
                                                                   beta_binomial_log_likelihood(counts, a, bb)));
            }
          }
  return {worst_rel <= 1e-7 && worst_reduction <= 1e-9,
          "max relative error vs quadrature " + fmt(worst_rel) + ", max |theta=1 - beta-binomial| " +
              fmt(worst_reduction)};
}

// -- 8 -----------------------------------------------------------------------
Verdict regression_behaviour() {
  const double slope = 0.37;
  const double intercept = 0.81;
  PassCurve exact;
  for (auto k : regression_ks(10000)) exact.points.push_back({k, std::exp(-intercept) * std::pow(k, -slope)});
  const auto fit = fit_loglog(exact);
  const double recovery = std::max(std::abs(fit.slope - slope), std::abs(fit.intercept - intercept));

  bool diverges = true;
  std::string detail = "power-law recovery error " + fmt(recovery) + "; half-easy first k with unclipped > 1:";
  for (std::int64_t budget : {500, 1000, 2000}) {
    Rng rng(derive_seed(kSeed, static_cast<std::uint64_t>(budget)));
    std::vector<double> p(100);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = i % 2 == 0 ? 0.3 : 0.0;
    const auto reg = fit_regression_baseline(sample_counts(p, budget / 100, rng));
    std::int64_t first = 0;
    for (std::int64_t k = 1; k <= 10000 && first == 0; ++k) {
      if (power_law_value(reg, k) > 1.0 && predict_power_law(reg, k) == 1.0) first = k;
    }
    diverges = diverges && first > 0;
    detail += " B=" + std::to_string(budget) + " k=" + (first ? std::to_string(first) : std::string("none"));
  }
  return {recovery <= 1e-6 && diverges, detail};
}

// -- 9 -----------------------------------------------------------------------
Verdict determinism() {
  const auto dir = fs::temp_directory_path() / "passk_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    Rng rng(derive_seed(kSeed, "pools"));
    const auto p = sample_difficulties(BetaDifficulty{0.6, 2.5}, 50, rng);
    std::ofstream out(dir / "pools.jsonl");
    write_outcomes(out, sample_pools(p, 400, rng));
  }
  const std::string spec = std::string(PASSK_CONFIG_DIR) + "/half_easy_impossible.json";
  const std::vector<std::vector<std::string>> runs = {
      {"evaluate", "--input", (dir / "pools.jsonl").string(), "--budgets", "200,2000,20000", "--ks",
       "log:10:400:6", "--methods", "all", "--seed", "7", "--threads", "4", "--out", (dir / "pools.csv").string()},
      {"evaluate", "--spec", spec, "--budgets", "500,1000,2000", "--ks", "log:100:10000:25", "--methods", "all",
       "--seed", "11", "--threads", "3", "--out", (dir / "synthetic.csv").string()},
      {"simulate", "--spec", spec, "--budget", "2000", "--strategy", "dynamic", "--k", "1000", "--seed", "3",
       "--out", (dir / "pred.json").string()},
  };
  auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  bool ok = true;
  std::string detail;
  for (const auto& args : runs) {
    const fs::path out = args.back();
    std::ostringstream sink;
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      if (cli::dispatch(args, sink, sink) != cli::kExitOk) {
        fs::remove_all(dir);
        return {false, args[0] + " failed: " + sink.str()};
      }
      if (rep == 0) first = slurp(out);
    }
    const bool same = !first.empty() && slurp(out) == first;
    ok = ok && same;
    detail += out.filename().string() + (same ? " identical" : " DIFFERS") + " (" + std::to_string(first.size()) +
              " bytes); ";
  }
  fs::remove_all(dir);
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

struct Criterion {
  int id;
  std::string name;
  std::function<Verdict()> check;
  double time_limit_s;  // 0 = none
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "combinatorial estimator matches exact arithmetic and recurrence", estimator_oracle, 5.0},
      {2, "Monte Carlo variance of the estimator at k=b and k=1", variance_formulas, 30.0},
      {3, "beta-binomial parameter recovery and uniform-difficulty curve", beta_binomial_recovery, 120.0},
      {4, "discretized-beta over-weights hard problems on uniform data", discretized_bias, 0.0},
      {5, "dynamic sampling beats uniform on half-easy/half-impossible", dynamic_vs_uniform, 0.0},
      {6, "oracle allocation variance at B=600 and closed-form shares", oracle_allocation, 0.0},
      {7, "scaled beta-binomial likelihood vs numerical integration", scaled_likelihood, 0.0},
      {8, "regression baseline recovery and divergence past 1", regression_behaviour, 0.0},
      {9, "evaluate/simulate outputs are byte-identical on rerun", determinism, 0.0},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0.0 && seconds > c.time_limit_s) {
      v.pass = false;
      v.detail += "; over time limit " + fmt(c.time_limit_s) + " s";
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " -- " << v.detail << " ("
              << fmt(seconds) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
