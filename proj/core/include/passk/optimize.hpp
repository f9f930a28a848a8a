#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace passk {

struct MinimizeOptions {
  double initial_step = 0.5;
  // Stop once the simplex's spread in objective value drops below
  // ftol * max(1, |f_best|) and its diameter below xtol.
  double ftol = 1e-10;
  double xtol = 1e-7;
  int max_iterations = 4000;
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Box-constrained Nelder-Mead. Points are projected onto [lower, upper];
/// the objective may return +inf for infeasible points.
MinimizeResult nelder_mead(const Objective& f, std::vector<double> start, std::span<const double> lower,
                           std::span<const double> upper, const MinimizeOptions& options = {});

}  // namespace passk
