#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "passk/estimators.hpp"
#include "passk/random.hpp"
#include "passk/records.hpp"

namespace passk {

struct UniformDifficulty {
  double lo = 0.0;
  double hi = 1.0;
};

struct BetaDifficulty {
  double alpha = 1.0;
  double beta = 1.0;
};

struct PointMass {
  double p;
  double weight;
};

/// Fixed difficulty levels; counts are assigned deterministically, not sampled.
struct PointMixture {
  std::vector<PointMass> components;
};

/// `n_easy` problems uniform on [easy_lo, easy_hi]; the rest sit at `outlier_p`.
struct HardOutlier {
  std::size_t n_easy = 99;
  double easy_lo = 0.1;
  double easy_hi = 0.3;
  double outlier_p = 1e-4;
};

using DifficultySpec = std::variant<UniformDifficulty, BetaDifficulty, PointMixture, HardOutlier>;

/// Throws std::invalid_argument on probabilities outside [0, 1], bad ranges,
/// non-positive beta parameters or mixture weights not summing to 1.
void check(const DifficultySpec& spec);

/// Point mixtures: round(weight * m) copies per component (largest remainder),
/// interleaved round-robin. Hard outliers: easy problems first, outliers last.
std::vector<double> sample_difficulties(const DifficultySpec& spec, std::size_t m, Rng& rng);

/// Exact dataset pass@k for known difficulties: mean of 1 - (1 - p_i)^k.
double true_pass_at_k(std::span<const double> p, std::int64_t k);
PassCurve true_pass_curve(std::span<const double> p, std::span<const std::int64_t> ks);

/// s_i ~ Binomial(b, p_i).
CountsState sample_counts(std::span<const double> p, std::int64_t b, Rng& rng);

/// `n` Bernoulli(p_i) outcomes per problem; ids "p0", "p1", ...
PoolSet sample_pools(std::span<const double> p, std::int64_t n, Rng& rng);

/// A difficulty spec plus an optional problem count, as read from JSON.
struct SyntheticConfig {
  DifficultySpec spec;
  std::optional<std::size_t> problems;
};

/// {"type": "uniform"|"beta"|"point_mixture"|"hard_outlier", ..., "problems": m}
SyntheticConfig parse_synthetic_config(std::string_view json_text);
std::string describe(const DifficultySpec& spec);

}  // namespace passk
