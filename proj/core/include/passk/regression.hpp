#pragma once

#include <cstdint>
#include <vector>

#include "passk/estimators.hpp"
#include "passk/records.hpp"

namespace passk {

/// Least-squares fit of -log(pass@k) = slope * log(k) + intercept.
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::int64_t k_min = 0;
  std::int64_t k_max = 0;
  double residual_sum_squares = 0.0;
  std::size_t points_used = 0;
  // Points with a zero pass rate are left out of the fit.
  std::size_t zeros_excluded = 0;
};

/// Throws std::invalid_argument when fewer than two points with distinct k
/// survive the exclusion of zero values.
PowerLawFit fit_loglog(const PassCurve& curve);

/// exp(-intercept) * k^(-slope), unclipped.
double power_law_value(const PowerLawFit& fit, std::int64_t k);

/// power_law_value clipped to [0, 1].
double predict_power_law(const PowerLawFit& fit, std::int64_t k);

/// k values the baseline fits on for `b` samples per problem: every integer in
/// [1, b] when b <= 64, otherwise 64 distinct log-spaced integers in [1, b].
std::vector<std::int64_t> regression_ks(std::int64_t b);

/// pass_at_k_dataset on regression_ks(min attempts).
PassCurve empirical_curve(const CountsState& counts);

/// empirical_curve followed by fit_loglog.
PowerLawFit fit_regression_baseline(const CountsState& counts);

}  // namespace passk
