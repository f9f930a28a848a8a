#include "passk/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "passk/error.hpp"

namespace passk {

ReplaySource::ReplaySource(std::span<const OutcomePool> pools, std::uint64_t seed)
    : ReplaySource(shuffle_pools(pools, seed)) {}

ReplaySource::ReplaySource(PoolSet pools) : pools_(std::move(pools)), cursor_(pools_.size(), 0) {}

ReplaySource ReplaySource::presorted(std::span<const OutcomePool> pools) {
  return ReplaySource(PoolSet(pools.begin(), pools.end()));
}

bool ReplaySource::attempt(std::size_t i) {
  const auto& pool = pools_.at(i);
  auto& pos = cursor_[i];
  if (pos >= pool.size()) throw SourceExhausted(i, served_);
  ++served_;
  return pool.outcomes[static_cast<std::size_t>(pos++)] != 0;
}

std::optional<std::int64_t> ReplaySource::remaining(std::size_t i) const {
  return pools_.at(i).size() - cursor_.at(i);
}

SyntheticSource::SyntheticSource(std::vector<double> probabilities, std::uint64_t seed)
    : p_(std::move(probabilities)), ids_(p_.size()), next_(p_.size(), 0), seed_(seed) {
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0 && p_[i] <= 1.0)) throw std::invalid_argument("SyntheticSource: probability outside [0, 1]");
    ids_[i] = std::to_string(i);
  }
}

bool SyntheticSource::attempt(std::size_t i) {
  const std::uint64_t j = next_.at(i)++;
  const double u = unit_interval(mix64(derive_seed(seed_, i) ^ mix64(j)));
  return u < p_[i];
}

std::size_t select_hardest_problem(const CountsState& state, Rng& rng) {
  if (state.empty()) throw std::invalid_argument("select_hardest_problem: no problems");
  const auto s = state.successes();
  const auto b = state.attempts();
  const auto s_min = *std::min_element(s.begin(), s.end());
  std::int64_t b_min = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == s_min) b_min = std::min(b_min, b[i]);
  }
  std::vector<std::size_t> hardest;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == s_min && b[i] == b_min) hardest.push_back(i);
  }
  std::uniform_int_distribution<std::size_t> pick(0, hardest.size() - 1);
  return hardest[pick(rng)];
}

CountsState run_dynamic_sampling(ProblemSource& source, std::int64_t budget, Rng& rng) {
  if (budget < 0) throw std::invalid_argument("run_dynamic_sampling: negative budget");
  const std::size_t m = source.size();
  if (m == 0) throw std::invalid_argument("run_dynamic_sampling: no problems");
  std::vector<std::string> ids(m);
  for (std::size_t i = 0; i < m; ++i) ids[i] = source.id(i);
  CountsState state(std::move(ids), std::vector<std::int64_t>(m, 0), std::vector<std::int64_t>(m, 0));

  // Problems bucketed by (successes, attempts); the first bucket is exactly
  // select_hardest_problem's candidate set. Picks within a bucket are uniform.
  using Key = std::pair<std::int64_t, std::int64_t>;
  std::map<Key, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < m; ++i) {
    if (source.remaining(i).value_or(1) > 0) buckets[{0, 0}].push_back(i);
  }

  std::size_t last = 0;
  for (std::int64_t t = 0; t < budget; ++t) {
    // Every problem is used up; report the one that ran dry last.
    if (buckets.empty()) throw SourceExhausted(last, t);
    auto first = buckets.begin();
    auto& members = first->second;
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    const std::size_t slot = pick(rng);
    const std::size_t i = members[slot];
    members[slot] = members.back();
    members.pop_back();
    if (members.empty()) buckets.erase(first);

    state.record(i, source.attempt(i));
    last = i;
    if (source.remaining(i).value_or(1) > 0) buckets[{state.successes(i), state.attempts(i)}].push_back(i);
  }
  return state;
}

CountsState run_uniform_sampling(ProblemSource& source, std::int64_t budget, Rng& rng) {
  if (budget < 0) throw std::invalid_argument("run_uniform_sampling: negative budget");
  const std::size_t m = source.size();
  if (m == 0) throw std::invalid_argument("run_uniform_sampling: no problems");
  const auto md = static_cast<std::int64_t>(m);
  std::vector<std::int64_t> budgets(m, budget / md);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (std::int64_t r = 0; r < budget % md; ++r) ++budgets[order[static_cast<std::size_t>(r)]];
  return run_fixed_allocation(source, budgets);
}

CountsState run_fixed_allocation(ProblemSource& source, std::span<const std::int64_t> budgets) {
  const std::size_t m = source.size();
  if (budgets.size() != m) throw std::invalid_argument("run_fixed_allocation: one budget per problem required");
  std::vector<std::string> ids(m);
  for (std::size_t i = 0; i < m; ++i) ids[i] = source.id(i);
  CountsState state(std::move(ids), std::vector<std::int64_t>(m, 0), std::vector<std::int64_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    if (budgets[i] < 0) throw std::invalid_argument("run_fixed_allocation: negative budget");
    for (std::int64_t j = 0; j < budgets[i]; ++j) state.record(i, source.attempt(i));
  }
  return state;
}

std::vector<std::int64_t> AllocationPlan::rounded() const {
  const auto target = static_cast<std::int64_t>(std::llround(total));
  std::vector<std::int64_t> out(budgets.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    const double floor_v = std::floor(budgets[i]);
    out[i] = static_cast<std::int64_t>(floor_v);
    assigned += out[i];
    remainders.emplace_back(budgets[i] - floor_v, i);
  }
  // Largest fractional parts first; ties go to the lower index.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < target && r < remainders.size(); ++r, ++assigned) ++out[remainders[r].second];
  return out;
}

AllocationPlan proportional_allocation(std::span<const double> weights, double total) {
  if (weights.empty()) throw std::invalid_argument("proportional_allocation: no problems");
  if (!(total > 0.0)) throw std::invalid_argument("proportional_allocation: total budget must be positive");
  AllocationPlan plan;
  plan.total = total;
  plan.problem_ids.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) plan.problem_ids[i] = std::to_string(i);
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("proportional_allocation: invalid weight");
    sum += w;
  }
  plan.budgets.resize(weights.size());
  if (sum == 0.0) {
    plan.uniform_fallback = true;
    std::fill(plan.budgets.begin(), plan.budgets.end(), total / static_cast<double>(weights.size()));
    return plan;
  }
  for (std::size_t i = 0; i < weights.size(); ++i) plan.budgets[i] = total * (weights[i] / sum);
  return plan;
}

AllocationPlan oracle_optimal_allocation(std::span<const double> p, std::int64_t k, double total) {
  if (k < 1) throw std::invalid_argument("oracle_optimal_allocation: need k >= 1");
  std::vector<double> weights(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw std::invalid_argument("oracle_optimal_allocation: p outside [0, 1]");
    if (p[i] == 0.0 || p[i] == 1.0) {
      weights[i] = 0.0;
      continue;
    }
    // sqrt(p (1-p)^(2k-1)) in log space.
    weights[i] = std::exp(0.5 * (std::log(p[i]) + static_cast<double>(2 * k - 1) * std::log1p(-p[i])));
  }
  return proportional_allocation(weights, total);
}

}  // namespace passk
