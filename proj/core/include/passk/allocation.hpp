#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "passk/random.hpp"
#include "passk/records.hpp"

namespace passk {

/// Per-problem attempt provider.
class ProblemSource {
 public:
  virtual ~ProblemSource() = default;

  virtual std::size_t size() const noexcept = 0;
  virtual const std::string& id(std::size_t i) const = 0;

  /// Outcome of the next attempt on problem `i`. Throws SourceExhausted when
  /// a finite source has nothing left for `i`.
  virtual bool attempt(std::size_t i) = 0;

  /// Attempts left for problem `i`, or nullopt when unbounded.
  virtual std::optional<std::int64_t> remaining(std::size_t i) const = 0;
};

/// Serves each problem's recorded outcomes once, in an order shuffled by
/// the global seed (see shuffle_pools).
class ReplaySource final : public ProblemSource {
 public:
  ReplaySource(std::span<const OutcomePool> pools, std::uint64_t seed);

  /// Replays `pools` in stored order, for pools already passed through shuffle_pools.
  static ReplaySource presorted(std::span<const OutcomePool> pools);

  std::size_t size() const noexcept override { return pools_.size(); }
  const std::string& id(std::size_t i) const override { return pools_.at(i).problem_id; }
  bool attempt(std::size_t i) override;
  std::optional<std::int64_t> remaining(std::size_t i) const override;

 private:
  explicit ReplaySource(PoolSet pools);

  PoolSet pools_;
  std::vector<std::int64_t> cursor_;
  std::int64_t served_ = 0;
};

/// Bernoulli(p_i) attempts; attempt j on problem i is a pure function of
/// (seed, i, j).
class SyntheticSource final : public ProblemSource {
 public:
  SyntheticSource(std::vector<double> probabilities, std::uint64_t seed);

  std::size_t size() const noexcept override { return p_.size(); }
  const std::string& id(std::size_t i) const override { return ids_.at(i); }
  bool attempt(std::size_t i) override;
  std::optional<std::int64_t> remaining(std::size_t) const override { return std::nullopt; }

 private:
  std::vector<double> p_;
  std::vector<std::string> ids_;
  std::vector<std::uint64_t> next_;
  std::uint64_t seed_;
};

/// Among problems with the fewest successes, those with the fewest attempts;
/// returns one of them uniformly at random. Requires a non-empty state.
std::size_t select_hardest_problem(const CountsState& state, Rng& rng);

/// Spends exactly `budget` attempts, each on select_hardest_problem's choice.
/// Problems whose finite source is used up drop out of the selection; running
/// out everywhere throws SourceExhausted.
CountsState run_dynamic_sampling(ProblemSource& source, std::int64_t budget, Rng& rng);

/// floor(budget / m) attempts per problem; the budget % m leftovers go to
/// distinct problems chosen at random.
CountsState run_uniform_sampling(ProblemSource& source, std::int64_t budget, Rng& rng);

/// Draws `budgets[i]` attempts from problem i.
CountsState run_fixed_allocation(ProblemSource& source, std::span<const std::int64_t> budgets);

/// Per-problem budget shares summing to `total`.
struct AllocationPlan {
  std::vector<std::string> problem_ids;
  std::vector<double> budgets;
  double total = 0.0;
  bool uniform_fallback = false;

  /// Integer budgets by the largest-remainder method; sums to round(total).
  std::vector<std::int64_t> rounded() const;
};

/// budgets_i = total * w_i / sum_j w_j. All-zero weights fall back to an even
/// split and set `uniform_fallback`.
AllocationPlan proportional_allocation(std::span<const double> weights, double total);

/// Variance-minimizing budgets for the plug-in pass@k estimator with known
/// difficulties: weights sqrt(p (1 - p)^(2k - 1)).
AllocationPlan oracle_optimal_allocation(std::span<const double> p, std::int64_t k, double total);

}  // namespace passk
