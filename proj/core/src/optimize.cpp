#include "passk/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace passk {
namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

double evaluate(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

MinimizeResult nelder_mead(const Objective& f, std::vector<double> start, std::span<const double> lower,
                           std::span<const double> upper, const MinimizeOptions& options) {
  const std::size_t n = start.size();
  if (n == 0 || lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("nelder_mead: dimension mismatch");
  }
  auto project = [&](std::vector<double>& x) {
    for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], lower[j], upper[j]);
  };

  project(start);
  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({start, evaluate(f, start)});
  for (std::size_t j = 0; j < n; ++j) {
    auto x = start;
    // Step away from a bound we are sitting on.
    x[j] += (x[j] + options.initial_step <= upper[j]) ? options.initial_step : -options.initial_step;
    project(x);
    simplex.push_back({x, evaluate(f, x)});
  }

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  MinimizeResult result;
  std::vector<double> centroid(n);
  auto point_along = [&](const std::vector<double>& from, double t) {
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + t * (from[j] - centroid[j]);
    project(x);
    return x;
  };

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const double best = simplex.front().f;
    const double worst = simplex.back().f;

    double diameter = 0.0;
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t j = 0; j < n; ++j) {
        diameter = std::max(diameter, std::abs(simplex[v].x[j] - simplex[0].x[j]));
      }
    }
    if (std::isfinite(best) && worst - best <= options.ftol * std::max(1.0, std::abs(best)) &&
        diameter <= options.xtol) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[v].x[j] / static_cast<double>(n);
    }

    auto reflected = point_along(simplex.back().x, -kReflect);
    const double fr = evaluate(f, reflected);
    if (fr < simplex.front().f) {
      auto expanded = point_along(simplex.back().x, -kExpand);
      const double fe = evaluate(f, expanded);
      simplex.back() = fe < fr ? Vertex{std::move(expanded), fe} : Vertex{std::move(reflected), fr};
      continue;
    }
    if (fr < simplex[n - 1].f) {
      simplex.back() = {std::move(reflected), fr};
      continue;
    }
    const bool outside = fr < simplex.back().f;
    auto contracted = point_along(outside ? reflected : simplex.back().x, kContract);
    const double fc = evaluate(f, contracted);
    if (fc < std::min(fr, simplex.back().f)) {
      simplex.back() = {std::move(contracted), fc};
      continue;
    }
    for (std::size_t v = 1; v <= n; ++v) {
      for (std::size_t j = 0; j < n; ++j) {
        simplex[v].x[j] = simplex[0].x[j] + kShrink * (simplex[v].x[j] - simplex[0].x[j]);
      }
      project(simplex[v].x);
      simplex[v].f = evaluate(f, simplex[v].x);
    }
  }

  const auto best_it =
      std::min_element(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  result.x = best_it->x;
  result.value = best_it->f;
  result.iterations = it;
  return result;
}

}  // namespace passk
