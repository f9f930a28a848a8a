#include "passk/distribution_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "passk/error.hpp"
#include "passk/optimize.hpp"
#include "passk/random.hpp"
#include "passk/special.hpp"

namespace passk {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distinct (b, s) pairs with multiplicities; likelihoods only depend on these.
struct CountGroup {
  std::int64_t b;
  std::int64_t s;
  double weight;
  double log_coefficient;  // log C(b, s)
};

std::vector<CountGroup> group_counts(const CountsState& counts) {
  std::map<std::pair<std::int64_t, std::int64_t>, double> tally;
  for (std::size_t i = 0; i < counts.size(); ++i) tally[{counts.attempts(i), counts.successes(i)}] += 1.0;
  std::vector<CountGroup> groups;
  groups.reserve(tally.size());
  for (const auto& [key, n] : tally) groups.push_back({key.first, key.second, n, log_choose(key.first, key.second)});
  return groups;
}

constexpr std::int64_t kDirectSumLimit = 64;

// log Gamma(x + n) - log Gamma(x) for integer n >= 0.
double log_rising(double x, std::int64_t n) {
  if (n <= kDirectSumLimit) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) acc += std::log(x + static_cast<double>(j));
    return acc;
  }
  return log_gamma(x + static_cast<double>(n)) - log_gamma(x);
}

// digamma(x + n) - digamma(x) for integer n >= 0.
double digamma_rising(double x, std::int64_t n) {
  if (n <= kDirectSumLimit) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) acc += 1.0 / (x + static_cast<double>(j));
    return acc;
  }
  return digamma(x + static_cast<double>(n)) - digamma(x);
}

// Prefix table of log rising factorials: table[n] = log Gamma(x + n) - log Gamma(x).
void rising_table(double x, std::int64_t n_max, std::vector<double>& table) {
  table.resize(static_cast<std::size_t>(n_max + 1));
  table[0] = 0.0;
  for (std::int64_t j = 0; j < n_max; ++j) {
    table[static_cast<std::size_t>(j + 1)] = table[static_cast<std::size_t>(j)] + std::log(x + static_cast<double>(j));
  }
}

constexpr std::int64_t kTableLimit = 1 << 14;

double grouped_log_likelihood(std::span<const CountGroup> groups, double alpha, double beta) {
  std::int64_t n_max = 0;
  for (const auto& g : groups) n_max = std::max(n_max, g.b);
  double ll = 0.0;
  if (n_max <= kTableLimit) {
    thread_local std::vector<double> ta;
    thread_local std::vector<double> tb;
    thread_local std::vector<double> tab;
    rising_table(alpha, n_max, ta);
    rising_table(beta, n_max, tb);
    rising_table(alpha + beta, n_max, tab);
    for (const auto& g : groups) {
      const auto s = static_cast<std::size_t>(g.s);
      const auto f = static_cast<std::size_t>(g.b - g.s);
      ll += g.weight * (g.log_coefficient + ta[s] + tb[f] - tab[static_cast<std::size_t>(g.b)]);
    }
    return ll;
  }
  for (const auto& g : groups) {
    if (g.b == 0) continue;
    ll += g.weight * (g.log_coefficient + log_rising(alpha, g.s) + log_rising(beta, g.b - g.s) -
                      log_rising(alpha + beta, g.b));
  }
  return ll;
}

void require_positive(double alpha, double beta, const char* where) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw std::invalid_argument(std::string(where) + ": alpha and beta must be positive and finite");
  }
}

// Method-of-moments guess for (alpha, beta) from per-problem ratios, allowing
// for binomial noise at the mean attempt count.
std::array<double, 2> moment_start(const CountsState& counts, double lower, double upper) {
  double n = 0.0;
  double mean = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts.attempts(i) == 0) continue;
    n += 1.0;
    mean += static_cast<double>(counts.successes(i)) / static_cast<double>(counts.attempts(i));
    mean_b += static_cast<double>(counts.attempts(i));
  }
  mean /= n;
  mean_b /= n;
  double var = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts.attempts(i) == 0) continue;
    const double r = static_cast<double>(counts.successes(i)) / static_cast<double>(counts.attempts(i));
    var += (r - mean) * (r - mean);
  }
  var /= n;
  const double mu = std::clamp(mean, 1e-3, 1.0 - 1e-3);
  double rho = 0.5;
  if (mean_b > 1.0) rho = (var / (mu * (1.0 - mu)) - 1.0 / mean_b) / (1.0 - 1.0 / mean_b);
  rho = std::clamp(rho, 1e-3, 0.999);
  const double total = 1.0 / rho - 1.0;
  return {std::clamp(mu * total, lower, upper), std::clamp((1.0 - mu) * total, lower, upper)};
}

struct MultiStartResult {
  std::array<double, 2> log_params;
  double value;
  bool converged;
};

// Minimizes `objective` over (log alpha, log beta) from `start` and seeded
// perturbations of it, keeping the best run.
MultiStartResult multi_start(const Objective& objective, std::array<double, 2> start, const FitOptions& options) {
  const std::array<double, 2> lo{std::log(options.lower), std::log(options.lower)};
  const std::array<double, 2> hi{std::log(options.upper), std::log(options.upper)};
  Rng rng(options.seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  MinimizeOptions nm;
  nm.ftol = options.tolerance;
  nm.max_iterations = options.max_iterations;

  MultiStartResult best{start, kInf, false};
  const int runs = std::max(1, options.restarts);
  for (int r = 0; r < runs; ++r) {
    std::vector<double> x0{std::log(start[0]), std::log(start[1])};
    if (r > 0) {
      x0[0] += jitter(rng);
      x0[1] += jitter(rng);
    }
    auto res = nelder_mead(objective, x0, lo, hi, nm);
    if (res.value < best.value) best = {{res.x[0], res.x[1]}, res.value, res.converged};
  }
  return best;
}

bool near_bound(double log_value, const FitOptions& options) {
  constexpr double kSlack = 1e-3;
  return log_value <= std::log(options.lower) + kSlack || log_value >= std::log(options.upper) - kSlack;
}

}  // namespace

BinSpec BinSpec::geometric(double theta, int count, double ratio) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("BinSpec: theta must lie in (0, 1]");
  if (count < 2) throw std::invalid_argument("BinSpec: need at least two bins");
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("BinSpec: ratio must lie in (0, 1)");
  std::vector<double> edges(static_cast<std::size_t>(count) + 1);
  const double denom = -std::expm1(static_cast<double>(count) * std::log(ratio));
  for (int i = 0; i <= count; ++i) {
    edges[static_cast<std::size_t>(i)] = theta * -std::expm1(static_cast<double>(i) * std::log(ratio)) / denom;
  }
  edges.front() = 0.0;
  edges.back() = theta;
  return BinSpec(std::move(edges));
}

BinSpec BinSpec::from_edges(std::vector<double> edges) {
  if (edges.size() < 3) throw std::invalid_argument("BinSpec: need at least two bins");
  if (edges.front() != 0.0) throw std::invalid_argument("BinSpec: first edge must be 0");
  if (edges.back() > 1.0) throw std::invalid_argument("BinSpec: last edge must not exceed 1");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw std::invalid_argument("BinSpec: edges must be strictly increasing");
  }
  return BinSpec(std::move(edges));
}

bool BinSpec::has_decreasing_widths() const noexcept {
  for (std::size_t i = 2; i < edges_.size(); ++i) {
    if (!(edges_[i] - edges_[i - 1] < edges_[i - 1] - edges_[i - 2])) return false;
  }
  return true;
}

std::size_t BinSpec::locate(double x) const noexcept {
  if (x < 0.0 || x > edges_.back()) return count();
  if (x == edges_.back()) return count() - 1;
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

double beta_binomial_log_likelihood(const CountsState& counts, double alpha, double beta) {
  require_positive(alpha, beta, "beta_binomial_log_likelihood");
  const auto groups = group_counts(counts);
  return grouped_log_likelihood(groups, alpha, beta);
}

std::array<double, 2> beta_binomial_gradient(const CountsState& counts, double alpha, double beta) {
  require_positive(alpha, beta, "beta_binomial_gradient");
  double da = 0.0;
  double db = 0.0;
  for (const auto& g : group_counts(counts)) {
    if (g.b == 0) continue;
    const double common = digamma_rising(alpha + beta, g.b);
    da += g.weight * (digamma_rising(alpha, g.s) - common);
    db += g.weight * (digamma_rising(beta, g.b - g.s) - common);
  }
  return {alpha * da, beta * db};
}

BetaParams fit_beta_binomial(const CountsState& counts, const FitOptions& options) {
  if (counts.size() < 2) throw std::invalid_argument("fit_beta_binomial: need at least two problems");
  if (counts.total_attempts() == 0) throw std::invalid_argument("fit_beta_binomial: no attempts recorded");

  const auto groups = group_counts(counts);
  auto objective = [&](std::span<const double> x) {
    return -grouped_log_likelihood(groups, std::exp(x[0]), std::exp(x[1]));
  };
  const auto best = multi_start(objective, moment_start(counts, options.lower, options.upper), options);

  BetaParams params;
  params.method = "beta-binomial";
  params.alpha = std::exp(best.log_params[0]);
  params.beta = std::exp(best.log_params[1]);
  params.theta = 1.0;
  params.log_likelihood = -best.value;
  params.boundary_hit = near_bound(best.log_params[0], options) || near_bound(best.log_params[1], options);
  params.converged = best.converged;
  if (params.converged && !params.boundary_hit) {
    // Interior optimum: the score should vanish relative to the data size.
    const auto grad = beta_binomial_gradient(counts, params.alpha, params.beta);
    const double scale = std::max(1.0, static_cast<double>(counts.size()));
    params.converged = std::hypot(grad[0], grad[1]) <= 1e-3 * scale;
  }
  return params;
}

double estimate_scale_theta(const CountsState& counts) {
  const auto b = counts.uniform_attempts();
  if (!b) throw std::invalid_argument("estimate_scale_theta: attempts differ across problems");
  if (*b < 1) throw std::invalid_argument("estimate_scale_theta: need at least one attempt per problem");
  const auto s_max = *std::max_element(counts.successes().begin(), counts.successes().end());
  if (s_max == 0) throw Error("estimate_scale_theta: degenerate scale, no problem has a success");
  const double bd = static_cast<double>(*b);
  return std::min(1.0, (bd + 1.0) / bd * (static_cast<double>(s_max) / bd));
}

double discretized_multinomial_nll(const CountsState& counts, const BinSpec& bins, double alpha, double beta,
                                   double theta) {
  require_positive(alpha, beta, "discretized_multinomial_nll");
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("discretized_multinomial_nll: theta in (0, 1]");
  if (counts.empty()) return 0.0;

  std::vector<double> occupancy(bins.count() + 1, 0.0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const auto b = counts.attempts(i);
    if (b == 0) throw std::invalid_argument("discretized_multinomial_nll: problem without attempts");
    occupancy[bins.locate(static_cast<double>(counts.successes(i)) / static_cast<double>(b))] += 1.0;
  }
  // Ratios outside the binned support carry no model mass.
  if (occupancy.back() > 0.0) return kInf;

  const auto edges = bins.edges();
  double nll = 0.0;
  double cdf_lo = 0.0;
  for (std::size_t i = 0; i < bins.count(); ++i) {
    const double cdf_hi = regularized_beta(alpha, beta, std::min(1.0, edges[i + 1] / theta));
    if (occupancy[i] > 0.0) {
      const double mass = cdf_hi - cdf_lo;
      if (!(mass > 0.0)) return kInf;
      nll -= occupancy[i] * std::log(mass);
    }
    cdf_lo = cdf_hi;
  }
  return nll;
}

BetaParams fit_discretized_beta(const CountsState& counts, const BinOptions& bin_options, const FitOptions& options) {
  const double theta = estimate_scale_theta(counts);
  const auto bins = BinSpec::geometric(theta, bin_options.count, bin_options.ratio);
  auto objective = [&](std::span<const double> x) {
    return discretized_multinomial_nll(counts, bins, std::exp(x[0]), std::exp(x[1]), theta);
  };
  const auto best = multi_start(objective, {1.0, 1.0}, options);

  BetaParams params;
  params.method = "discretized-beta";
  params.alpha = std::exp(best.log_params[0]);
  params.beta = std::exp(best.log_params[1]);
  params.theta = theta;
  params.log_likelihood = -best.value;
  params.converged = best.converged && std::isfinite(best.value);
  params.boundary_hit = near_bound(best.log_params[0], options) || near_bound(best.log_params[1], options);
  return params;
}

double scaled_beta_binomial_log_likelihood(std::int64_t b, std::int64_t s, double alpha, double beta,
                                           double theta) {
  if (s < 0 || s > b) throw std::invalid_argument("scaled_beta_binomial_log_likelihood: need 0 <= s <= b");
  require_positive(alpha, beta, "scaled_beta_binomial_log_likelihood");
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("scaled_beta_binomial_log_likelihood: theta");

  // W_i = C(b-s, i) theta^(s+i) Be(s+i+alpha, beta). Only the ratios W_i / W_0
  // enter the alternating sum; they follow an exact recurrence and are kept in
  // long double so the cancellation eats into the extra precision first.
  using ld = long double;
  const std::int64_t n = b - s;
  const ld log_theta = std::log(static_cast<ld>(theta));
  std::vector<ld> log_ratio(static_cast<std::size_t>(n + 1), 0.0L);
  for (std::int64_t i = 0; i < n; ++i) {
    const ld x = static_cast<ld>(s + i) + alpha;
    log_ratio[static_cast<std::size_t>(i + 1)] =
        log_ratio[static_cast<std::size_t>(i)] + std::log(static_cast<ld>(n - i) / static_cast<ld>(i + 1)) +
        log_theta + std::log(x / (x + beta));
  }
  const ld shift = *std::max_element(log_ratio.begin(), log_ratio.end());
  ld positive = 0.0L;
  ld negative = 0.0L;
  for (std::int64_t i = 0; i <= n; ++i) {
    const ld t = std::exp(log_ratio[static_cast<std::size_t>(i)] - shift);
    (i % 2 == 0 ? positive : negative) += t;
  }
  const ld signed_sum = positive - negative;
  const ld abs_sum = positive + negative;
  // Give up once the rounding noise could exceed 1e-9 of the result.
  const ld noise = std::numeric_limits<ld>::epsilon() * abs_sum * static_cast<ld>(n + 1);
  if (!(signed_sum > 0.0L) || noise > 1e-9L * signed_sum) {
    std::ostringstream msg;
    msg << "scaled beta-binomial series cancelled for b=" << b << ", s=" << s << ", theta=" << theta;
    throw NumericalError(msg.str());
  }
  const double log_w0 = static_cast<double>(s) * std::log(theta) + log_beta(static_cast<double>(s) + alpha, beta);
  return log_choose(b, s) - log_beta(alpha, beta) + log_w0 + static_cast<double>(shift + std::log(signed_sum));
}

double scaled_beta_binomial_log_likelihood(const CountsState& counts, double alpha, double beta, double theta) {
  double ll = 0.0;
  for (const auto& g : group_counts(counts)) {
    ll += g.weight * scaled_beta_binomial_log_likelihood(g.b, g.s, alpha, beta, theta);
  }
  return ll;
}

double predict_pass_at_k_quadrature(const BetaParams& params, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("predict_pass_at_k: need k >= 1");
  require_positive(params.alpha, params.beta, "predict_pass_at_k");
  const double a = params.alpha;
  const double b = params.beta;
  const double theta = params.theta;
  const auto kd = static_cast<double>(k);
  // E[(1 - theta u)^k] for u ~ Beta(a, b), then complement.
  auto integrand = [&](double u, double one_minus_u) {
    const double miss = theta == 1.0 ? one_minus_u : 1.0 - theta * u;
    return std::exp(kd * std::log(miss) + beta_log_density(u, one_minus_u, a, b));
  };
  const double split = (a > 1.0 && b > 1.0) ? (a - 1.0) / (a + b - 2.0) : 0.5;
  const double miss = integrate_unit(integrand, 0.0, split) + integrate_unit(integrand, split, 1.0);
  const double value = 1.0 - miss;
  if (value < -1e-9 || value > 1.0 + 1e-9) {
    throw NumericalError("predict_pass_at_k: quadrature result outside [0, 1]");
  }
  return std::clamp(value, 0.0, 1.0);
}

double predict_pass_at_k(const BetaParams& params, std::int64_t k) {
  if (k < 1) throw std::invalid_argument("predict_pass_at_k: need k >= 1");
  require_positive(params.alpha, params.beta, "predict_pass_at_k");
  if (params.theta != 1.0) return predict_pass_at_k_quadrature(params, k);
  // 1 - prod_{j<k} (beta + j) / (alpha + beta + j)
  const double log_miss = log_rising(params.beta, k) - log_rising(params.alpha + params.beta, k);
  return std::clamp(-std::expm1(log_miss), 0.0, 1.0);
}

double scaled_beta_cdf(const BetaParams& params, double x) {
  require_positive(params.alpha, params.beta, "scaled_beta_cdf");
  return regularized_beta(params.alpha, params.beta, std::min(1.0, x / params.theta));
}

}  // namespace passk
