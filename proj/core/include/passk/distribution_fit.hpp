#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "passk/records.hpp"

namespace passk {

/// Fitted difficulty distribution Beta(alpha, beta) on (0, theta).
struct BetaParams {
  std::string method = "beta-binomial";
  double alpha = 1.0;
  double beta = 1.0;
  double theta = 1.0;
  double log_likelihood = 0.0;
  bool converged = false;
  bool boundary_hit = false;
};

struct FitOptions {
  double lower = 1e-6;
  double upper = 1e6;
  /// Method-of-moments start plus (restarts - 1) seeded perturbations of it.
  int restarts = 5;
  double tolerance = 1e-10;
  int max_iterations = 4000;
  std::uint64_t seed = 0x9a55'4b00ULL;
};

/// Geometric bin family for the discretized baseline.
struct BinOptions {
  int count = 20;
  double ratio = 0.5;
};

/// Bin edges 0 = e_0 < e_1 < ... < e_l over [0, theta].
class BinSpec {
 public:
  /// e_i = theta * (1 - ratio^i) / (1 - ratio^count); widths shrink toward theta.
  static BinSpec geometric(double theta, int count, double ratio);

  /// Arbitrary strictly increasing edges starting at 0 (at least two bins).
  static BinSpec from_edges(std::vector<double> edges);

  std::span<const double> edges() const noexcept { return edges_; }
  std::size_t count() const noexcept { return edges_.size() - 1; }
  double upper() const noexcept { return edges_.back(); }
  bool has_decreasing_widths() const noexcept;

  /// Bin holding x: [e_i, e_{i+1}), with the last bin closed at the top.
  /// Returns count() when x lies outside [0, upper()].
  std::size_t locate(double x) const noexcept;

 private:
  explicit BinSpec(std::vector<double> edges) : edges_(std::move(edges)) {}
  std::vector<double> edges_;
};

/// Sum over problems of log C(b, s) + log Be(s + alpha, b - s + beta) - log Be(alpha, beta).
double beta_binomial_log_likelihood(const CountsState& counts, double alpha, double beta);

/// Gradient of beta_binomial_log_likelihood with respect to (log alpha, log beta).
std::array<double, 2> beta_binomial_gradient(const CountsState& counts, double alpha, double beta);

/// Maximum-likelihood Beta(alpha, beta) for the counts. Requires at least two
/// problems and at least one attempt.
BetaParams fit_beta_binomial(const CountsState& counts, const FitOptions& options = {});

/// min(1, (b + 1) / b * max_i s_i / b). Requires uniform attempts b >= 1 and
/// at least one success.
double estimate_scale_theta(const CountsState& counts);

/// -sum_i n_i log A_i where n_i counts problems with s/b in bin i and A_i is
/// the scaled-beta mass of the bin. +inf when a populated bin has no mass.
double discretized_multinomial_nll(const CountsState& counts, const BinSpec& bins, double alpha, double beta,
                                   double theta);

/// Scale from estimate_scale_theta, then (alpha, beta) minimizing
/// discretized_multinomial_nll over geometric bins.
BetaParams fit_discretized_beta(const CountsState& counts, const BinOptions& bins = {},
                                const FitOptions& options = {});

/// Log-likelihood of s successes in b attempts under the scaled beta-binomial,
/// via an alternating log-sum-exp series. Throws NumericalError when the
/// series cancels below working precision.
double scaled_beta_binomial_log_likelihood(std::int64_t b, std::int64_t s, double alpha, double beta,
                                           double theta);
double scaled_beta_binomial_log_likelihood(const CountsState& counts, double alpha, double beta, double theta);

/// Expected pass@k under the fitted distribution: closed form when theta = 1,
/// adaptive quadrature otherwise.
double predict_pass_at_k(const BetaParams& params, std::int64_t k);

/// Quadrature route for any theta; used as the reference for the closed form.
double predict_pass_at_k_quadrature(const BetaParams& params, std::int64_t k);

/// CDF of the scaled beta at x.
double scaled_beta_cdf(const BetaParams& params, double x);

}  // namespace passk
