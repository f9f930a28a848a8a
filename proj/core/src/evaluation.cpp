#include "passk/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "passk/allocation.hpp"
#include "passk/error.hpp"
#include "passk/regression.hpp"

namespace passk {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Per-budget stream: every method sharing a sampling strategy sees the same counts.
std::uint64_t budget_seed(std::uint64_t seed, std::int64_t budget) {
  return derive_seed(seed, static_cast<std::uint64_t>(budget));
}

std::uint64_t sampling_seed(std::uint64_t cell_seed, Sampling sampling) {
  return derive_seed(cell_seed, sampling == Sampling::uniform ? "uniform" : "dynamic");
}

CountsState draw_counts(ProblemSource& source, Sampling sampling, std::int64_t budget, std::uint64_t cell_seed) {
  Rng rng(sampling_seed(cell_seed, sampling));
  return sampling == Sampling::uniform ? run_uniform_sampling(source, budget, rng)
                                       : run_dynamic_sampling(source, budget, rng);
}

template <typename MakeSource>
void fill_budget(EvalGrid& grid, std::size_t budget_index, const GridOptions& options,
                 std::span<const double> truth, MakeSource&& make_source) {
  const auto budget = options.budgets[budget_index];
  const auto cell_seed = budget_seed(options.seed, budget);
  const std::size_t per_budget = options.methods.size() * options.ks.size();

  std::optional<CountsState> counts[2];
  std::string sampling_error[2];
  for (std::size_t mi = 0; mi < options.methods.size(); ++mi) {
    const auto& method = options.methods[mi];
    const auto slot = static_cast<std::size_t>(method.sampling);
    if (!counts[slot] && sampling_error[slot].empty()) {
      try {
        auto source = make_source();
        counts[slot] = draw_counts(*source, method.sampling, budget, cell_seed);
      } catch (const std::exception& e) {
        sampling_error[slot] = e.what();
      }
    }

    std::vector<double> predictions;
    std::string note = sampling_error[slot];
    if (note.empty()) {
      try {
        predictions = fit_and_predict(method.fitter, *counts[slot], options.ks, options.settings);
      } catch (const std::exception& e) {
        note = e.what();
      }
    }
    for (std::size_t ki = 0; ki < options.ks.size(); ++ki) {
      auto& cell = grid.cells[budget_index * per_budget + mi * options.ks.size() + ki];
      cell.budget = budget;
      cell.k = options.ks[ki];
      cell.method = method_tag(method);
      cell.truth = truth[ki];
      cell.seed = cell_seed;
      if (note.empty()) {
        cell.prediction = predictions[ki];
        cell.squared_error = (predictions[ki] - truth[ki]) * (predictions[ki] - truth[ki]);
      } else {
        cell.prediction = kNaN;
        cell.squared_error = kNaN;
        cell.error_note = note;
      }
    }
  }
}

template <typename MakeSource>
EvalGrid run_grid_impl(const GridOptions& options, std::size_t problems, std::span<const double> truth,
                       MakeSource&& make_source) {
  EvalGrid grid;
  grid.budgets = options.budgets;
  grid.ks = options.ks;
  for (const auto& m : options.methods) grid.methods.push_back(method_tag(m));
  grid.problems = problems;
  grid.seed = options.seed;
  grid.cells.resize(options.budgets.size() * options.methods.size() * options.ks.size());

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.budgets.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next++; b < options.budgets.size(); b = next++) {
      fill_budget(grid, b, options, truth, make_source);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return grid;
}

void check_axes(const GridOptions& options) {
  if (options.budgets.empty() || options.ks.empty() || options.methods.empty()) {
    throw std::invalid_argument("run_grid: budgets, ks and methods must be non-empty");
  }
  for (auto b : options.budgets) {
    if (b < 0) throw std::invalid_argument("run_grid: negative budget");
  }
  for (std::size_t i = 0; i < options.ks.size(); ++i) {
    if (options.ks[i] < 1 || (i > 0 && options.ks[i] <= options.ks[i - 1])) {
      throw std::invalid_argument("run_grid: ks must be positive and strictly increasing");
    }
  }
}

std::vector<double> sample_problem_difficulties(const SyntheticInput& input, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "difficulties"));
  return sample_difficulties(input.spec, input.problems, rng);
}

std::uint64_t outcome_seed(std::uint64_t seed) { return derive_seed(seed, "outcomes"); }

}  // namespace

std::string fitter_tag(Fitter fitter) {
  switch (fitter) {
    case Fitter::beta_binomial:
      return "beta-binomial";
    case Fitter::discretized_beta:
      return "discretized-beta";
    case Fitter::loglog_regression:
      return "loglog-regression";
  }
  return "unknown";
}

std::optional<Fitter> parse_fitter(std::string_view tag) {
  for (auto f : {Fitter::beta_binomial, Fitter::discretized_beta, Fitter::loglog_regression}) {
    if (fitter_tag(f) == tag) return f;
  }
  return std::nullopt;
}

std::string method_tag(const Method& method) {
  if (method.fitter == Fitter::beta_binomial) {
    return method.sampling == Sampling::dynamic ? "dynamic-beta-binomial" : "uniform-beta-binomial";
  }
  const auto base = fitter_tag(method.fitter);
  return method.sampling == Sampling::uniform ? base : "dynamic-" + base;
}

std::optional<Method> parse_method(std::string_view tag) {
  for (auto s : {Sampling::uniform, Sampling::dynamic}) {
    for (auto f : {Fitter::beta_binomial, Fitter::discretized_beta, Fitter::loglog_regression}) {
      if (method_tag({s, f}) == tag) return Method{s, f};
    }
  }
  return std::nullopt;
}

std::vector<Method> all_methods() {
  return {{Sampling::uniform, Fitter::loglog_regression},
          {Sampling::uniform, Fitter::discretized_beta},
          {Sampling::dynamic, Fitter::beta_binomial},
          {Sampling::uniform, Fitter::beta_binomial}};
}

std::vector<double> fit_and_predict(Fitter fitter, const CountsState& counts, std::span<const std::int64_t> ks,
                                    const FitSettings& settings) {
  std::vector<double> out;
  out.reserve(ks.size());
  switch (fitter) {
    case Fitter::beta_binomial: {
      const auto params = fit_beta_binomial(counts, settings.fit);
      for (auto k : ks) out.push_back(predict_pass_at_k(params, k));
      break;
    }
    case Fitter::discretized_beta: {
      const auto params = fit_discretized_beta(counts, settings.bins, settings.fit);
      for (auto k : ks) out.push_back(predict_pass_at_k(params, k));
      break;
    }
    case Fitter::loglog_regression: {
      const auto fit = fit_regression_baseline(counts);
      for (auto k : ks) out.push_back(predict_power_law(fit, k));
      break;
    }
  }
  return out;
}

double mse(const PassCurve& prediction, const PassCurve& truth) {
  if (prediction.points.size() != truth.points.size()) throw std::invalid_argument("mse: k grids differ in length");
  if (prediction.points.empty()) throw std::invalid_argument("mse: empty curves");
  double total = 0.0;
  for (std::size_t i = 0; i < truth.points.size(); ++i) {
    if (prediction.points[i].k != truth.points[i].k) throw std::invalid_argument("mse: k grids differ");
    const double d = prediction.points[i].value - truth.points[i].value;
    total += d * d;
  }
  return total / static_cast<double>(truth.points.size());
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: no values");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

IntervalEstimate bootstrap_ci(const CountsState& counts, Fitter fitter, std::int64_t k,
                              const BootstrapOptions& options, Rng& rng, const FitSettings& settings) {
  if (counts.size() < 2) throw std::invalid_argument("bootstrap_ci: need at least two problems");
  if (options.resamples < 1) throw std::invalid_argument("bootstrap_ci: need at least one resample");
  if (!(options.level > 0.0 && options.level < 1.0)) throw std::invalid_argument("bootstrap_ci: level in (0, 1)");

  const std::array<std::int64_t, 1> ks{k};
  IntervalEstimate est;
  est.level = options.level;
  est.resamples = options.resamples;
  est.point = fit_and_predict(fitter, counts, ks, settings).front();

  std::uniform_int_distribution<std::size_t> pick(0, counts.size() - 1);
  std::vector<std::size_t> idx(counts.size());
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(options.resamples));
  for (int r = 0; r < options.resamples; ++r) {
    for (auto& i : idx) i = pick(rng);
    try {
      draws.push_back(fit_and_predict(fitter, counts.select(idx), ks, settings).front());
    } catch (const std::exception&) {
      ++est.failures;
    }
  }
  if (static_cast<double>(est.failures) > options.max_failure_share * options.resamples) {
    throw Error("bootstrap_ci: " + fitter_tag(fitter) + " fit failed on " + std::to_string(est.failures) + " of " +
                std::to_string(options.resamples) + " resamples");
  }
  const double tail = 0.5 * (1.0 - options.level);
  est.lower = std::min(quantile(draws, tail), est.point);
  est.upper = std::max(quantile(draws, 1.0 - tail), est.point);
  return est;
}

const GridCell& EvalGrid::cell(std::int64_t budget, std::int64_t k, std::string_view method) const {
  for (const auto& c : cells) {
    if (c.budget == budget && c.k == k && c.method == method) return c;
  }
  throw std::out_of_range("EvalGrid: no such cell");
}

std::vector<std::int64_t> log_spaced(std::int64_t lo, std::int64_t hi, std::size_t count) {
  if (lo < 1 || hi < lo || count == 0) throw std::invalid_argument("log_spaced: need 1 <= lo <= hi and count >= 1");
  std::vector<std::int64_t> out;
  if (count == 1) return {lo};
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi));
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(count - 1);
    const auto k = static_cast<std::int64_t>(std::llround(std::exp(a + t * (b - a))));
    if (out.empty() || k > out.back()) out.push_back(std::clamp(k, lo, hi));
  }
  return out;
}

std::vector<std::int64_t> default_ks() { return log_spaced(100, 10000, 25); }

EvalGrid run_grid(std::span<const OutcomePool> pools, const GridOptions& options) {
  check_axes(options);
  if (pools.empty()) throw std::invalid_argument("run_grid: no problems");
  const auto truth_curve = ground_truth_curve(pools, options.ks);
  const auto truth = truth_curve.values();
  // Shuffle once; every source replays the same per-problem order.
  const auto shuffled = shuffle_pools(pools, options.seed);
  return run_grid_impl(options, pools.size(), truth, [&] {
    return std::make_unique<ReplaySource>(ReplaySource::presorted(shuffled));
  });
}

EvalGrid run_grid(const SyntheticInput& input, const GridOptions& options) {
  check_axes(options);
  const auto p = sample_problem_difficulties(input, options.seed);
  const auto truth = true_pass_curve(p, options.ks).values();
  return run_grid_impl(options, p.size(), truth,
                       [&] { return std::make_unique<SyntheticSource>(p, outcome_seed(options.seed)); });
}

SimulationResult simulate(const SyntheticInput& input, const Method& method, std::int64_t budget, std::int64_t k,
                          std::uint64_t seed, const FitSettings& settings) {
  SimulationResult result;
  result.difficulties = sample_problem_difficulties(input, seed);
  SyntheticSource source(result.difficulties, outcome_seed(seed));
  result.counts = draw_counts(source, method.sampling, budget, budget_seed(seed, budget));
  const std::array<std::int64_t, 1> ks{k};
  result.prediction = fit_and_predict(method.fitter, result.counts, ks, settings).front();
  result.truth = true_pass_at_k(result.difficulties, k);
  result.squared_error = (result.prediction - result.truth) * (result.prediction - result.truth);
  return result;
}

}  // namespace passk
