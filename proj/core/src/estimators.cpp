#include "passk/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "passk/special.hpp"

namespace passk {

std::vector<std::int64_t> PassCurve::ks() const {
  std::vector<std::int64_t> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.k);
  return out;
}

std::vector<double> PassCurve::values() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.value);
  return out;
}

void PassCurve::check() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].k < 1) throw std::invalid_argument("PassCurve: k must be positive");
    if (i > 0 && points[i].k <= points[i - 1].k) {
      throw std::invalid_argument("PassCurve: k values must be strictly increasing");
    }
    if (!(points[i].value >= 0.0 && points[i].value <= 1.0)) {
      throw std::invalid_argument("PassCurve: value outside [0, 1] at k=" + std::to_string(points[i].k));
    }
  }
}

bool PassCurve::is_monotone() const noexcept {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].value < points[i - 1].value) return false;
  }
  return true;
}

namespace {
constexpr std::int64_t kDirectProductLimit = 4096;
}  // namespace

double pass_at_k_unbiased(std::int64_t b, std::int64_t s, std::int64_t k) {
  if (s < 0 || s > b) throw std::invalid_argument("pass_at_k_unbiased: need 0 <= s <= b");
  if (k < 1) throw std::invalid_argument("pass_at_k_unbiased: need k >= 1");
  if (k > b) {
    throw std::invalid_argument("pass_at_k_unbiased: k=" + std::to_string(k) + " exceeds b=" + std::to_string(b));
  }
  // Every k-subset contains a success.
  if (b - s < k) return 1.0;
  if (s == 0) return 0.0;
  // C(b-s, k) / C(b, k) = prod_{j<k} (1 - s/(b-j)) = prod_{i<s} (1 - k/(b-i)).
  // The shorter product is more accurate than differencing log-gammas.
  const std::int64_t terms = std::min(s, k);
  if (terms <= kDirectProductLimit) {
    const std::int64_t other = terms == s ? k : s;
    long double log_ratio = 0.0L;
    for (std::int64_t j = 0; j < terms; ++j) {
      log_ratio += std::log1p(-static_cast<long double>(other) / static_cast<long double>(b - j));
    }
    return static_cast<double>(-std::expm1(log_ratio));
  }
  const double log_ratio = log_choose(b - s, k) - log_choose(b, k);
  return -std::expm1(log_ratio);
}

double pass_at_k_dataset(const CountsState& counts, std::int64_t k) {
  if (counts.empty()) throw std::invalid_argument("pass_at_k_dataset: no problems");
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts.attempts(i) < k) {
      throw std::invalid_argument("pass_at_k_dataset: problem " + counts.id(i) + " has " +
                                  std::to_string(counts.attempts(i)) + " attempts < k=" + std::to_string(k));
    }
    total += pass_at_k_unbiased(counts.attempts(i), counts.successes(i), k);
  }
  return total / static_cast<double>(counts.size());
}

PassCurve ground_truth_curve(std::span<const OutcomePool> pools, std::span<const std::int64_t> ks) {
  const auto counts = full_counts(pools);
  PassCurve curve;
  curve.method = "ground-truth";
  curve.budget = counts.total_attempts();
  for (auto k : ks) curve.points.push_back({k, pass_at_k_dataset(counts, k)});
  curve.check();
  return curve;
}

double frequentist_pass_at_k(const CountsState& counts, std::int64_t k) {
  if (counts.empty()) throw std::invalid_argument("frequentist_pass_at_k: no problems");
  if (k < 1) throw std::invalid_argument("frequentist_pass_at_k: need k >= 1");
  double miss = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto b = counts.attempts(i);
    if (b == 0) throw std::invalid_argument("frequentist_pass_at_k: problem " + counts.id(i) + " has no attempts");
    const double ratio = static_cast<double>(counts.successes(i)) / static_cast<double>(b);
    miss += ratio >= 1.0 ? 0.0 : std::exp(static_cast<double>(k) * std::log1p(-ratio));
  }
  return 1.0 - miss / static_cast<double>(counts.size());
}

}  // namespace passk
