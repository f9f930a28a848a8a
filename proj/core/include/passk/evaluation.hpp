#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "passk/distribution_fit.hpp"
#include "passk/estimators.hpp"
#include "passk/random.hpp"
#include "passk/records.hpp"
#include "passk/synthetic.hpp"

namespace passk {

enum class Fitter { beta_binomial, discretized_beta, loglog_regression };
enum class Sampling { uniform, dynamic };

/// A sampling strategy paired with a fitter.
struct Method {
  Sampling sampling;
  Fitter fitter;

  friend bool operator==(const Method&, const Method&) = default;
};

/// Tags: "loglog-regression", "discretized-beta" (both uniform sampling),
/// "dynamic-beta-binomial", "uniform-beta-binomial".
std::string method_tag(const Method& method);
std::optional<Method> parse_method(std::string_view tag);
std::vector<Method> all_methods();

std::string fitter_tag(Fitter fitter);
std::optional<Fitter> parse_fitter(std::string_view tag);

struct FitSettings {
  FitOptions fit;
  BinOptions bins;
};

/// Fits `fitter` to the counts and predicts pass@k at every k in `ks`.
std::vector<double> fit_and_predict(Fitter fitter, const CountsState& counts, std::span<const std::int64_t> ks,
                                    const FitSettings& settings = {});

/// Mean squared pointwise difference. Throws std::invalid_argument on
/// mismatched k grids.
double mse(const PassCurve& prediction, const PassCurve& truth);

struct IntervalEstimate {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
  int resamples = 0;
  int failures = 0;
};

struct BootstrapOptions {
  int resamples = 200;
  double level = 0.95;
  /// Fail when more than this share of resample fits throw.
  double max_failure_share = 0.2;
};

/// Linear-interpolation (type 7) sample quantile; `q` in [0, 1].
double quantile(std::vector<double> values, double q);

/// Percentile bootstrap over problems: resample problems with replacement,
/// refit, predict at k. The point estimate comes from the full data and the
/// interval is widened to contain it when necessary.
IntervalEstimate bootstrap_ci(const CountsState& counts, Fitter fitter, std::int64_t k,
                              const BootstrapOptions& options, Rng& rng, const FitSettings& settings = {});

struct GridCell {
  std::int64_t budget = 0;
  std::int64_t k = 0;
  std::string method;
  /// NaN when the method failed; see error_note.
  double prediction = 0.0;
  double truth = 0.0;
  double squared_error = 0.0;
  std::uint64_t seed = 0;
  std::string error_note;

  bool ok() const noexcept { return error_note.empty(); }
};

struct EvalGrid {
  std::vector<std::int64_t> budgets;
  std::vector<std::int64_t> ks;
  std::vector<std::string> methods;
  std::size_t problems = 0;
  std::uint64_t seed = 0;
  /// Budget-major, then method, then k.
  std::vector<GridCell> cells;

  const GridCell& cell(std::int64_t budget, std::int64_t k, std::string_view method) const;
};

struct GridOptions {
  std::vector<std::int64_t> budgets;
  std::vector<std::int64_t> ks;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 0;
  unsigned threads = 1;
  FitSettings settings;
};

struct SyntheticInput {
  DifficultySpec spec;
  std::size_t problems = 100;
};

/// `k` log-spaced integers between lo and hi inclusive (duplicates dropped).
std::vector<std::int64_t> log_spaced(std::int64_t lo, std::int64_t hi, std::size_t count);

/// Default prediction grid: 25 log-spaced k between 100 and 10000.
std::vector<std::int64_t> default_ks();

/// Budget x k x method errors against full-pool ground truth. Uniform
/// methods and dynamic sampling replay the same seeded shuffle of each pool.
EvalGrid run_grid(std::span<const OutcomePool> pools, const GridOptions& options);

/// Same protocol on synthetic difficulties; truth is analytic.
EvalGrid run_grid(const SyntheticInput& input, const GridOptions& options);

struct SimulationResult {
  double prediction = 0.0;
  double truth = 0.0;
  double squared_error = 0.0;
  CountsState counts;
  std::vector<double> difficulties;
};

/// One synthetic run; reproduces the matching run_grid cell for the same seed.
SimulationResult simulate(const SyntheticInput& input, const Method& method, std::int64_t budget, std::int64_t k,
                          std::uint64_t seed, const FitSettings& settings = {});

}  // namespace passk
