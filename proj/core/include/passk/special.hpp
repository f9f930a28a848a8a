#pragma once

#include <cstdint>
#include <functional>

namespace passk {

/// log C(n, k) via log-gamma. Requires 0 <= k <= n.
double log_choose(std::int64_t n, std::int64_t k);

/// log Be(a, b) for a, b > 0.
double log_beta(double a, double b);

double log_gamma(double x);
double digamma(double x);

/// Regularized incomplete beta I_x(a, b).
double regularized_beta(double a, double b, double x);

/// Log-density of Beta(a, b) at u in (0, 1). `one_minus_u` is passed separately
/// so callers near u = 1 keep full precision.
double beta_log_density(double u, double one_minus_u, double a, double b);

/// Integrand receiving (x, 1 - x) on the unit interval.
using UnitIntegrand = std::function<double(double x, double one_minus_x)>;

/// Adaptive double-exponential quadrature of `f` over [lo, hi] within [0, 1],
/// robust to integrable endpoint singularities. Throws NumericalError when the
/// error estimate exceeds `abs_tol` by more than a factor of 100.
double integrate_unit(const UnitIntegrand& f, double lo, double hi, double abs_tol = 1e-10);

}  // namespace passk
