#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace passk {

/// Recorded attempt outcomes for one problem, in stored order (1 = success).
struct OutcomePool {
  std::string problem_id;
  std::vector<std::uint8_t> outcomes;

  std::int64_t size() const noexcept { return static_cast<std::int64_t>(outcomes.size()); }
  std::int64_t successes() const noexcept;
};

using PoolSet = std::vector<OutcomePool>;

/// Per-problem (successes, attempts) tallies. Every mutation keeps
/// 0 <= successes <= attempts.
class CountsState {
 public:
  CountsState() = default;

  /// `m` problems with zero tallies and ids "0".."m-1".
  explicit CountsState(std::size_t m);

  /// Throws std::invalid_argument on mismatched lengths or a violated invariant.
  CountsState(std::vector<std::string> ids, std::vector<std::int64_t> successes,
              std::vector<std::int64_t> attempts);

  /// Tallies with the same attempts `b` for every problem.
  static CountsState uniform(std::span<const std::int64_t> successes, std::int64_t b);

  std::size_t size() const noexcept { return successes_.size(); }
  bool empty() const noexcept { return successes_.empty(); }

  std::int64_t successes(std::size_t i) const { return successes_.at(i); }
  std::int64_t attempts(std::size_t i) const { return attempts_.at(i); }
  const std::string& id(std::size_t i) const { return ids_.at(i); }

  std::span<const std::int64_t> successes() const noexcept { return successes_; }
  std::span<const std::int64_t> attempts() const noexcept { return attempts_; }
  std::span<const std::string> ids() const noexcept { return ids_; }

  /// Records one attempt on problem `i`.
  void record(std::size_t i, bool success);

  std::int64_t total_attempts() const noexcept;
  std::int64_t min_attempts() const noexcept;
  std::int64_t max_attempts() const noexcept;

  /// Common attempt count when every problem has the same number, else nullopt.
  std::optional<std::int64_t> uniform_attempts() const noexcept;

  /// Problems drawn by index (duplicates allowed), used by resampling.
  CountsState select(std::span<const std::size_t> indices) const;

  friend bool operator==(const CountsState&, const CountsState&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<std::int64_t> successes_;
  std::vector<std::int64_t> attempts_;
};

struct ValidationReport {
  std::size_t problems = 0;
  std::int64_t min_attempts = 0;
  std::int64_t max_attempts = 0;
  std::int64_t total_attempts = 0;
  std::size_t zero_success_problems = 0;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

enum class RecordMode { outcomes, counts };

using ParsedRecords = std::variant<PoolSet, CountsState>;

/// Reads JSONL records, one problem per line; blank lines are skipped.
/// Throws ParseError (with line number) on malformed lines, duplicate ids
/// or successes exceeding attempts.
ParsedRecords parse_records(std::istream& in, RecordMode mode);
PoolSet parse_outcomes(std::istream& in);
CountsState parse_counts(std::istream& in);

/// Like parse_records but collects every problem instead of throwing.
ValidationReport validate_records(std::istream& in, RecordMode mode);
ValidationReport validate(const CountsState& counts);

void write_outcomes(std::ostream& out, std::span<const OutcomePool> pools);
void write_counts(std::ostream& out, const CountsState& counts);

/// Tallies of the complete pools.
CountsState full_counts(std::span<const OutcomePool> pools);

/// Pools with each problem's outcomes permuted by a stream seeded from
/// (seed, hash(problem_id)); adding or removing problems leaves other
/// problems' permutations unchanged.
PoolSet shuffle_pools(std::span<const OutcomePool> pools, std::uint64_t seed);

/// Counts the first `per_problem` outcomes of each problem after a seeded
/// shuffle (or in stored order when `seed` is empty).
CountsState truncate_uniform(std::span<const OutcomePool> pools, std::int64_t per_problem,
                             std::optional<std::uint64_t> seed);

}  // namespace passk
