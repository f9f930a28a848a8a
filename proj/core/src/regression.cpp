#include "passk/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace passk {

PowerLawFit fit_loglog(const PassCurve& curve) {
  PowerLawFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : curve.points) {
    if (p.value <= 0.0) {
      ++fit.zeros_excluded;
      continue;
    }
    if (p.k < 1 || p.value > 1.0) throw std::invalid_argument("fit_loglog: point outside k >= 1, value in (0, 1]");
    xs.push_back(std::log(static_cast<double>(p.k)));
    ys.push_back(-std::log(p.value));
    fit.k_min = fit.points_used == 0 ? p.k : std::min(fit.k_min, p.k);
    fit.k_max = std::max(fit.k_max, p.k);
    ++fit.points_used;
  }
  if (fit.points_used < 2 || fit.k_min == fit.k_max) {
    throw std::invalid_argument("fit_loglog: fewer than two usable points (" + std::to_string(fit.zeros_excluded) +
                                " zero values excluded)");
  }

  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.slope * xs[i] - fit.intercept;
    fit.residual_sum_squares += r * r;
  }
  return fit;
}

double power_law_value(const PowerLawFit& fit, std::int64_t k) {
  return std::exp(-fit.intercept - fit.slope * std::log(static_cast<double>(k)));
}

double predict_power_law(const PowerLawFit& fit, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("predict_power_law: need k >= 1");
  return std::min(1.0, power_law_value(fit, k));
}

std::vector<std::int64_t> regression_ks(std::int64_t b) {
  constexpr std::int64_t kPoints = 64;
  std::vector<std::int64_t> ks;
  if (b < 1) return ks;
  if (b <= kPoints) {
    for (std::int64_t k = 1; k <= b; ++k) ks.push_back(k);
    return ks;
  }
  // Geometric spacing; rounding collisions at the low end are bumped upward so
  // exactly kPoints distinct integers remain.
  const double log_b = std::log(static_cast<double>(b));
  for (std::int64_t j = 0; j < kPoints; ++j) {
    auto k = static_cast<std::int64_t>(std::llround(std::exp(log_b * static_cast<double>(j) / (kPoints - 1))));
    if (!ks.empty() && k <= ks.back()) k = ks.back() + 1;
    ks.push_back(k);
  }
  // Bumps can push the tail past b; pull it back down from the top.
  ks.back() = b;
  for (auto j = static_cast<std::ptrdiff_t>(ks.size()) - 2; j >= 0 && ks[j] >= ks[j + 1]; --j) ks[j] = ks[j + 1] - 1;
  return ks;
}

PassCurve empirical_curve(const CountsState& counts) {
  PassCurve curve;
  curve.method = "empirical";
  curve.budget = counts.total_attempts();
  for (auto k : regression_ks(counts.min_attempts())) curve.points.push_back({k, pass_at_k_dataset(counts, k)});
  return curve;
}

PowerLawFit fit_regression_baseline(const CountsState& counts) { return fit_loglog(empirical_curve(counts)); }

}  // namespace passk
