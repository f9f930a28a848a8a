#include "passk/records.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "passk/error.hpp"
#include "passk/random.hpp"

namespace passk {

using nlohmann::json;

std::int64_t OutcomePool::successes() const noexcept {
  return std::count(outcomes.begin(), outcomes.end(), std::uint8_t{1});
}

CountsState::CountsState(std::size_t m) : ids_(m), successes_(m, 0), attempts_(m, 0) {
  for (std::size_t i = 0; i < m; ++i) ids_[i] = std::to_string(i);
}

CountsState::CountsState(std::vector<std::string> ids, std::vector<std::int64_t> successes,
                         std::vector<std::int64_t> attempts)
    : ids_(std::move(ids)), successes_(std::move(successes)), attempts_(std::move(attempts)) {
  if (ids_.size() != successes_.size() || ids_.size() != attempts_.size()) {
    throw std::invalid_argument("CountsState: ids, successes and attempts differ in length");
  }
  for (std::size_t i = 0; i < successes_.size(); ++i) {
    if (successes_[i] < 0 || attempts_[i] < 0) {
      throw std::invalid_argument("CountsState: negative tally for problem " + ids_[i]);
    }
    if (successes_[i] > attempts_[i]) {
      throw std::invalid_argument("CountsState: successes exceed attempts for problem " + ids_[i]);
    }
  }
}

CountsState CountsState::uniform(std::span<const std::int64_t> successes, std::int64_t b) {
  CountsState out(successes.size());
  for (std::size_t i = 0; i < successes.size(); ++i) {
    if (successes[i] < 0 || successes[i] > b) {
      throw std::invalid_argument("CountsState: successes outside [0, attempts]");
    }
    out.successes_[i] = successes[i];
    out.attempts_[i] = b;
  }
  return out;
}

void CountsState::record(std::size_t i, bool success) {
  ++attempts_.at(i);
  if (success) ++successes_[i];
}

std::int64_t CountsState::total_attempts() const noexcept {
  return std::accumulate(attempts_.begin(), attempts_.end(), std::int64_t{0});
}

std::int64_t CountsState::min_attempts() const noexcept {
  return attempts_.empty() ? 0 : *std::min_element(attempts_.begin(), attempts_.end());
}

std::int64_t CountsState::max_attempts() const noexcept {
  return attempts_.empty() ? 0 : *std::max_element(attempts_.begin(), attempts_.end());
}

std::optional<std::int64_t> CountsState::uniform_attempts() const noexcept {
  if (attempts_.empty()) return std::nullopt;
  const auto b = attempts_.front();
  for (auto a : attempts_) {
    if (a != b) return std::nullopt;
  }
  return b;
}

CountsState CountsState::select(std::span<const std::size_t> indices) const {
  CountsState out;
  out.ids_.reserve(indices.size());
  out.successes_.reserve(indices.size());
  out.attempts_.reserve(indices.size());
  for (auto i : indices) {
    out.ids_.push_back(ids_.at(i));
    out.successes_.push_back(successes_[i]);
    out.attempts_.push_back(attempts_[i]);
  }
  return out;
}

namespace {

struct RawCounts {
  std::string id;
  std::int64_t successes;
  std::int64_t attempts;
};

std::string require_id(const json& rec) {
  auto it = rec.find("problem_id");
  if (it == rec.end() || !it->is_string()) throw std::runtime_error("missing string field \"problem_id\"");
  return it->get<std::string>();
}

std::int64_t require_int(const json& rec, const char* field) {
  auto it = rec.find(field);
  if (it == rec.end() || !it->is_number_integer()) {
    throw std::runtime_error(std::string("missing integer field \"") + field + "\"");
  }
  return it->get<std::int64_t>();
}

OutcomePool decode_outcomes(const json& rec) {
  OutcomePool pool{require_id(rec), {}};
  auto it = rec.find("outcomes");
  if (it == rec.end() || !it->is_array()) throw std::runtime_error("missing array field \"outcomes\"");
  pool.outcomes.reserve(it->size());
  for (const auto& v : *it) {
    if (v.is_boolean()) {
      pool.outcomes.push_back(v.get<bool>() ? 1 : 0);
    } else if (v.is_number_integer() && (v.get<std::int64_t>() == 0 || v.get<std::int64_t>() == 1)) {
      pool.outcomes.push_back(static_cast<std::uint8_t>(v.get<std::int64_t>()));
    } else {
      throw std::runtime_error("outcomes must be 0 or 1");
    }
  }
  if (pool.outcomes.empty()) throw std::runtime_error("outcome pool is empty");
  return pool;
}

RawCounts decode_counts(const json& rec) {
  RawCounts c{require_id(rec), require_int(rec, "successes"), require_int(rec, "attempts")};
  if (c.successes < 0 || c.attempts < 0) throw std::runtime_error("negative count");
  return c;
}

// Calls `on_record(line_no, json)` for every non-blank line; JSON syntax errors
// go to `on_error`.
template <typename OnRecord, typename OnError>
void for_each_record(std::istream& in, OnRecord&& on_record, OnError&& on_error) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      on_error(line_no, std::string("malformed JSON: ") + e.what());
      continue;
    }
    if (!rec.is_object()) {
      on_error(line_no, "record is not a JSON object");
      continue;
    }
    on_record(line_no, rec);
  }
}

}  // namespace

PoolSet parse_outcomes(std::istream& in) {
  PoolSet pools;
  std::unordered_set<std::string> seen;
  for_each_record(
      in,
      [&](std::size_t line_no, const json& rec) {
        OutcomePool pool;
        try {
          pool = decode_outcomes(rec);
        } catch (const std::exception& e) {
          throw ParseError(line_no, e.what());
        }
        if (!seen.insert(pool.problem_id).second) {
          throw ParseError(line_no, "duplicate problem_id \"" + pool.problem_id + "\"");
        }
        pools.push_back(std::move(pool));
      },
      [](std::size_t line_no, const std::string& msg) { throw ParseError(line_no, msg); });
  if (pools.empty()) throw ParseError(0, "no records");
  return pools;
}

CountsState parse_counts(std::istream& in) {
  std::vector<std::string> ids;
  std::vector<std::int64_t> successes;
  std::vector<std::int64_t> attempts;
  std::unordered_set<std::string> seen;
  for_each_record(
      in,
      [&](std::size_t line_no, const json& rec) {
        RawCounts c;
        try {
          c = decode_counts(rec);
        } catch (const std::exception& e) {
          throw ParseError(line_no, e.what());
        }
        if (c.successes > c.attempts) throw ParseError(line_no, "successes exceed attempts");
        if (!seen.insert(c.id).second) throw ParseError(line_no, "duplicate problem_id \"" + c.id + "\"");
        ids.push_back(std::move(c.id));
        successes.push_back(c.successes);
        attempts.push_back(c.attempts);
      },
      [](std::size_t line_no, const std::string& msg) { throw ParseError(line_no, msg); });
  if (ids.empty()) throw ParseError(0, "no records");
  return CountsState(std::move(ids), std::move(successes), std::move(attempts));
}

ParsedRecords parse_records(std::istream& in, RecordMode mode) {
  if (mode == RecordMode::outcomes) return parse_outcomes(in);
  return parse_counts(in);
}

ValidationReport validate(const CountsState& counts) {
  ValidationReport report;
  report.problems = counts.size();
  report.min_attempts = counts.min_attempts();
  report.max_attempts = counts.max_attempts();
  report.total_attempts = counts.total_attempts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts.successes(i) == 0) ++report.zero_success_problems;
  }
  if (counts.empty()) report.violations.push_back("no problems");
  return report;
}

ValidationReport validate_records(std::istream& in, RecordMode mode) {
  ValidationReport report;
  std::unordered_set<std::string> seen;
  bool first = true;
  auto add = [&](const std::string& id, std::int64_t s, std::int64_t b, std::size_t line_no) {
    if (!seen.insert(id).second) {
      report.violations.push_back("line " + std::to_string(line_no) + ": duplicate problem_id \"" + id + "\"");
      return;
    }
    ++report.problems;
    report.total_attempts += b;
    report.min_attempts = first ? b : std::min(report.min_attempts, b);
    report.max_attempts = first ? b : std::max(report.max_attempts, b);
    first = false;
    if (s == 0) ++report.zero_success_problems;
    if (s > b) {
      report.violations.push_back("line " + std::to_string(line_no) + ": successes exceed attempts");
    }
  };
  for_each_record(
      in,
      [&](std::size_t line_no, const json& rec) {
        try {
          if (mode == RecordMode::outcomes) {
            auto pool = decode_outcomes(rec);
            add(pool.problem_id, pool.successes(), pool.size(), line_no);
          } else {
            auto c = decode_counts(rec);
            add(c.id, c.successes, c.attempts, line_no);
          }
        } catch (const std::exception& e) {
          report.violations.push_back("line " + std::to_string(line_no) + ": " + e.what());
        }
      },
      [&](std::size_t line_no, const std::string& msg) {
        report.violations.push_back("line " + std::to_string(line_no) + ": " + msg);
      });
  if (report.problems == 0) report.violations.push_back("no records");
  return report;
}

void write_outcomes(std::ostream& out, std::span<const OutcomePool> pools) {
  for (const auto& pool : pools) {
    json rec;
    rec["problem_id"] = pool.problem_id;
    auto& arr = rec["outcomes"] = json::array();
    for (auto o : pool.outcomes) arr.push_back(static_cast<int>(o));
    out << rec.dump() << '\n';
  }
}

void write_counts(std::ostream& out, const CountsState& counts) {
  for (std::size_t i = 0; i < counts.size(); ++i) {
    json rec;
    rec["problem_id"] = counts.id(i);
    rec["successes"] = counts.successes(i);
    rec["attempts"] = counts.attempts(i);
    out << rec.dump() << '\n';
  }
}

CountsState full_counts(std::span<const OutcomePool> pools) {
  std::vector<std::string> ids;
  std::vector<std::int64_t> s;
  std::vector<std::int64_t> b;
  for (const auto& pool : pools) {
    ids.push_back(pool.problem_id);
    s.push_back(pool.successes());
    b.push_back(pool.size());
  }
  return CountsState(std::move(ids), std::move(s), std::move(b));
}

PoolSet shuffle_pools(std::span<const OutcomePool> pools, std::uint64_t seed) {
  PoolSet out(pools.begin(), pools.end());
  for (auto& pool : out) {
    Rng rng(derive_seed(seed, fnv1a(pool.problem_id)));
    std::shuffle(pool.outcomes.begin(), pool.outcomes.end(), rng);
  }
  return out;
}

CountsState truncate_uniform(std::span<const OutcomePool> pools, std::int64_t per_problem,
                             std::optional<std::uint64_t> seed) {
  if (per_problem < 0) throw std::invalid_argument("truncate_uniform: negative per-problem budget");
  PoolSet shuffled;
  std::span<const OutcomePool> view = pools;
  if (seed) {
    shuffled = shuffle_pools(pools, *seed);
    view = shuffled;
  }
  std::vector<std::string> ids;
  std::vector<std::int64_t> s;
  std::vector<std::int64_t> b;
  for (const auto& pool : view) {
    if (per_problem > pool.size()) {
      throw std::invalid_argument("truncate_uniform: problem \"" + pool.problem_id + "\" has only " +
                                  std::to_string(pool.size()) + " outcomes, " + std::to_string(per_problem) +
                                  " requested");
    }
    ids.push_back(pool.problem_id);
    s.push_back(std::count(pool.outcomes.begin(), pool.outcomes.begin() + per_problem, std::uint8_t{1}));
    b.push_back(per_problem);
  }
  return CountsState(std::move(ids), std::move(s), std::move(b));
}

}  // namespace passk
