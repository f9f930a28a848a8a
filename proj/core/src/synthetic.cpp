#include "passk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "passk/allocation.hpp"

namespace passk {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double sample_beta(double alpha, double beta, Rng& rng) {
  std::gamma_distribution<double> gx(alpha, 1.0);
  std::gamma_distribution<double> gy(beta, 1.0);
  const double x = gx(rng);
  const double y = gy(rng);
  if (x + y == 0.0) return alpha >= beta ? 1.0 : 0.0;
  return x / (x + y);
}

}  // namespace

void check(const DifficultySpec& spec) {
  std::visit(Overloaded{
                 [](const UniformDifficulty& u) {
                   if (!is_probability(u.lo) || !is_probability(u.hi) || u.lo > u.hi) {
                     throw std::invalid_argument("uniform difficulty: need 0 <= lo <= hi <= 1");
                   }
                 },
                 [](const BetaDifficulty& b) {
                   if (!(b.alpha > 0.0) || !(b.beta > 0.0)) {
                     throw std::invalid_argument("beta difficulty: alpha and beta must be positive");
                   }
                 },
                 [](const PointMixture& mix) {
                   if (mix.components.empty()) throw std::invalid_argument("point mixture: no components");
                   double total = 0.0;
                   for (const auto& c : mix.components) {
                     if (!is_probability(c.p)) throw std::invalid_argument("point mixture: p outside [0, 1]");
                     if (!(c.weight >= 0.0)) throw std::invalid_argument("point mixture: negative weight");
                     total += c.weight;
                   }
                   if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("point mixture: weights must sum to 1");
                 },
                 [](const HardOutlier& h) {
                   if (!is_probability(h.easy_lo) || !is_probability(h.easy_hi) || h.easy_lo > h.easy_hi ||
                       !is_probability(h.outlier_p)) {
                     throw std::invalid_argument("hard outlier: probabilities outside [0, 1]");
                   }
                 },
             },
             spec);
}

std::vector<double> sample_difficulties(const DifficultySpec& spec, std::size_t m, Rng& rng) {
  if (m == 0) throw std::invalid_argument("sample_difficulties: need m >= 1");
  check(spec);
  std::vector<double> p;
  p.reserve(m);
  std::visit(Overloaded{
                 [&](const UniformDifficulty& u) {
                   std::uniform_real_distribution<double> d(u.lo, u.hi);
                   for (std::size_t i = 0; i < m; ++i) p.push_back(u.lo == u.hi ? u.lo : d(rng));
                 },
                 [&](const BetaDifficulty& b) {
                   for (std::size_t i = 0; i < m; ++i) p.push_back(sample_beta(b.alpha, b.beta, rng));
                 },
                 [&](const PointMixture& mix) {
                   std::vector<double> weights;
                   for (const auto& c : mix.components) weights.push_back(c.weight);
                   auto counts = proportional_allocation(weights, static_cast<double>(m)).rounded();
                   while (p.size() < m) {
                     for (std::size_t c = 0; c < counts.size(); ++c) {
                       if (counts[c] > 0) {
                         p.push_back(mix.components[c].p);
                         --counts[c];
                       }
                     }
                   }
                 },
                 [&](const HardOutlier& h) {
                   if (h.n_easy >= m) throw std::invalid_argument("hard outlier: n_easy must be below m");
                   std::uniform_real_distribution<double> d(h.easy_lo, h.easy_hi);
                   for (std::size_t i = 0; i < h.n_easy; ++i) p.push_back(d(rng));
                   while (p.size() < m) p.push_back(h.outlier_p);
                 },
             },
             spec);
  return p;
}

double true_pass_at_k(std::span<const double> p, std::int64_t k) {
  if (p.empty()) throw std::invalid_argument("true_pass_at_k: no problems");
  if (k < 1) throw std::invalid_argument("true_pass_at_k: need k >= 1");
  double hit = 0.0;
  for (double pi : p) {
    if (!is_probability(pi)) throw std::invalid_argument("true_pass_at_k: p outside [0, 1]");
    hit += pi >= 1.0 ? 1.0 : -std::expm1(static_cast<double>(k) * std::log1p(-pi));
  }
  return hit / static_cast<double>(p.size());
}

PassCurve true_pass_curve(std::span<const double> p, std::span<const std::int64_t> ks) {
  PassCurve curve;
  curve.method = "truth";
  for (auto k : ks) curve.points.push_back({k, true_pass_at_k(p, k)});
  curve.check();
  return curve;
}

CountsState sample_counts(std::span<const double> p, std::int64_t b, Rng& rng) {
  if (b < 0) throw std::invalid_argument("sample_counts: negative attempts");
  std::vector<std::int64_t> s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!is_probability(p[i])) throw std::invalid_argument("sample_counts: p outside [0, 1]");
    std::binomial_distribution<std::int64_t> d(b, p[i]);
    s[i] = d(rng);
  }
  return CountsState::uniform(s, b);
}

PoolSet sample_pools(std::span<const double> p, std::int64_t n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_pools: need at least one outcome per problem");
  PoolSet pools(p.size());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    pools[i].problem_id = "p" + std::to_string(i);
    pools[i].outcomes.resize(static_cast<std::size_t>(n));
    for (auto& o : pools[i].outcomes) o = u(rng) < p[i] ? 1 : 0;
  }
  return pools;
}

SyntheticConfig parse_synthetic_config(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("synthetic spec: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("type")) throw std::invalid_argument("synthetic spec: missing \"type\"");
  SyntheticConfig cfg;
  try {
    const auto type = doc.at("type").get<std::string>();
    if (type == "uniform") {
      cfg.spec = UniformDifficulty{doc.value("lo", 0.0), doc.value("hi", 1.0)};
    } else if (type == "beta") {
      cfg.spec = BetaDifficulty{doc.at("alpha").get<double>(), doc.at("beta").get<double>()};
    } else if (type == "point_mixture") {
      PointMixture mix;
      for (const auto& c : doc.at("components")) mix.components.push_back({c.at("p").get<double>(), c.at("weight").get<double>()});
      cfg.spec = std::move(mix);
    } else if (type == "hard_outlier") {
      HardOutlier h;
      h.n_easy = doc.value("n_easy", h.n_easy);
      h.easy_lo = doc.value("easy_lo", h.easy_lo);
      h.easy_hi = doc.value("easy_hi", h.easy_hi);
      h.outlier_p = doc.value("outlier_p", h.outlier_p);
      cfg.spec = h;
    } else {
      throw std::invalid_argument("synthetic spec: unknown type \"" + type + "\"");
    }
    if (doc.contains("problems")) cfg.problems = doc.at("problems").get<std::size_t>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("synthetic spec: ") + e.what());
  }
  check(cfg.spec);
  return cfg;
}

std::string describe(const DifficultySpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const UniformDifficulty& u) { os << "uniform(" << u.lo << "," << u.hi << ")"; },
                 [&](const BetaDifficulty& b) { os << "beta(" << b.alpha << "," << b.beta << ")"; },
                 [&](const PointMixture& mix) {
                   os << "point_mixture(";
                   for (std::size_t i = 0; i < mix.components.size(); ++i) {
                     os << (i ? ";" : "") << mix.components[i].p << ":" << mix.components[i].weight;
                   }
                   os << ")";
                 },
                 [&](const HardOutlier& h) {
                   os << "hard_outlier(" << h.n_easy << "," << h.easy_lo << "," << h.easy_hi << "," << h.outlier_p
                      << ")";
                 },
             },
             spec);
  return os.str();
}

}  // namespace passk
