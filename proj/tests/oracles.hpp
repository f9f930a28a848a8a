// Test-only reference computations. Nothing here calls into the library's
// numerical code paths.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace passk::oracle {

// Pascal's triangle up to n = 64; C(64, 32) fits in uint64.
inline const std::vector<std::vector<std::uint64_t>>& pascal() {
  static const auto table = [] {
    std::vector<std::vector<std::uint64_t>> t(65);
    for (std::size_t n = 0; n <= 64; ++n) {
      t[n].assign(n + 1, 1);
      for (std::size_t k = 1; k < n; ++k) t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
    }
    return t;
  }();
  return table;
}

inline std::uint64_t choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  return pascal()[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// 1 - C(b-s, k)/C(b, k) with exact integer binomials.
inline long double exact_pass_at_k(std::int64_t b, std::int64_t s, std::int64_t k) {
  return 1.0L - static_cast<long double>(choose(b - s, k)) / static_cast<long double>(choose(b, k));
}

/// Right-hand side of the pass@k recurrence from l up to k.
inline long double recurrence_pass_at_k(std::int64_t b, std::int64_t s, std::int64_t l, std::int64_t k) {
  long double acc = exact_pass_at_k(b, s, l);
  for (std::int64_t m = l; m < k; ++m) {
    acc += static_cast<long double>(s) * static_cast<long double>(choose(b - s, m)) /
           (static_cast<long double>(b - m) * static_cast<long double>(choose(b, m)));
  }
  return acc;
}

/// C(b, s) * integral over (0, theta) of p^s (1-p)^(b-s) scaled-Beta(alpha, beta, theta) dp,
/// integrated in u = p / theta.
inline double scaled_beta_binomial_probability(std::int64_t b, std::int64_t s, double alpha, double beta,
                                               double theta) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double log_norm = std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta);
  auto f = [&](double x, double xc) {
    const double one_minus = x > 0.5 ? xc : 1.0 - x;
    if (x <= 0.0 || one_minus <= 0.0) return 0.0;
    const double p = theta * x;
    const double q = theta == 1.0 ? one_minus : 1.0 - p;
    return std::exp(static_cast<double>(s) * std::log(p) + static_cast<double>(b - s) * std::log(q) +
                    (alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log(one_minus) + log_norm);
  };
  const double integral = integrator.integrate(f, 0.0, 1.0, 1e-14);
  return static_cast<double>(choose(b, s)) * integral;
}

/// E[1 - (1 - theta u)^k] for u ~ Beta(alpha, beta) by binomial expansion:
/// sum_j C(k, j) (-theta)^j Be(alpha + j, beta) / Be(alpha, beta). Small k only.
inline double expected_pass_at_k_series(double alpha, double beta, double theta, std::int64_t k) {
  double miss = 0.0;
  for (std::int64_t j = 0; j <= k; ++j) {
    const double term = static_cast<double>(choose(k, j)) * std::pow(-theta, static_cast<double>(j)) *
                        std::exp(std::lgamma(alpha + j) - std::lgamma(alpha) + std::lgamma(alpha + beta) -
                                 std::lgamma(alpha + beta + j));
    miss += term;
  }
  return 1.0 - miss;
}

/// Expected pass@k by direct quadrature over the (unscaled) beta density.
inline double expected_pass_at_k_quadrature(double alpha, double beta, std::int64_t k) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double log_norm = std::lgamma(alpha + beta) - std::lgamma(alpha) - std::lgamma(beta);
  auto f = [&](double x, double xc) {
    const double one_minus = x > 0.5 ? xc : 1.0 - x;
    if (x <= 0.0 || one_minus <= 0.0) return 0.0;
    return std::exp(static_cast<double>(k) * std::log(one_minus) + (alpha - 1.0) * std::log(x) +
                    (beta - 1.0) * std::log(one_minus) + log_norm);
  };
  return 1.0 - integrator.integrate(f, 0.0, 1.0, 1e-14);
}

/// Sample mean and variance with standard errors of each.
struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double variance_se = 0.0;
};

inline Moments moments(const std::vector<double>& xs) {
  Moments m;
  const auto n = static_cast<double>(xs.size());
  for (double x : xs) m.mean += x;
  m.mean /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m.variance = m2 / (n - 1.0);
  m4 /= n;
  const double pop_var = m2 / n;
  m.variance_se = std::sqrt(std::max(0.0, m4 - pop_var * pop_var) / n);
  return m;
}

}  // namespace passk::oracle
