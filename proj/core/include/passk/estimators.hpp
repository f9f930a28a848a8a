#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "passk/records.hpp"

namespace passk {

struct CurvePoint {
  std::int64_t k;
  double value;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

/// Pass-rate estimates indexed by attempt count, with provenance.
struct PassCurve {
  std::vector<CurvePoint> points;
  std::string method;
  std::int64_t budget = 0;
  std::uint64_t seed = 0;

  std::vector<std::int64_t> ks() const;
  std::vector<double> values() const;

  /// Throws std::invalid_argument unless k is strictly increasing and every
  /// value lies in [0, 1].
  void check() const;
  bool is_monotone() const noexcept;
};

/// Unbiased per-problem pass@k from `s` successes in `b` attempts:
/// 1 - C(b-s, k) / C(b, k), evaluated through log-gamma.
/// Requires 0 <= s <= b and 1 <= k <= b.
double pass_at_k_unbiased(std::int64_t b, std::int64_t s, std::int64_t k);

/// Dataset pass@k: the mean of pass_at_k_unbiased over problems.
/// Requires k <= min attempts.
double pass_at_k_dataset(const CountsState& counts, std::int64_t k);

/// pass_at_k_dataset of the complete pools at every k in `ks`.
PassCurve ground_truth_curve(std::span<const OutcomePool> pools, std::span<const std::int64_t> ks);

/// Plug-in estimator 1 - (1/m) sum (1 - s_i/b_i)^k. Requires every b_i >= 1.
double frequentist_pass_at_k(const CountsState& counts, std::int64_t k);

}  // namespace passk
