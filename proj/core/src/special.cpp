#include "passk/special.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "passk/error.hpp"

namespace passk {

double log_gamma(double x) { return boost::math::lgamma(x); }

double digamma(double x) { return boost::math::digamma(x); }

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  return log_gamma(nd + 1.0) - log_gamma(kd + 1.0) - log_gamma(nd - kd + 1.0);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

double regularized_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

double beta_log_density(double u, double one_minus_u, double a, double b) {
  return (a - 1.0) * std::log(u) + (b - 1.0) * std::log(one_minus_u) - log_beta(a, b);
}

double integrate_unit(const UnitIntegrand& f, double lo, double hi, double abs_tol) {
  if (!(lo < hi)) return 0.0;
  // tanh_sinh hands the two-argument functor the signed distance to the nearest
  // endpoint; translate that into (x, 1 - x) without losing digits near 0 or 1.
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  auto g = [&](double x, double xc) {
    double x_val = x;
    double x_comp = 1.0 - x;
    const double mid = 0.5 * (lo + hi);
    if (x < mid && lo == 0.0) {
      x_val = -xc;
    } else if (x > mid && hi == 1.0) {
      x_comp = xc;
    }
    if (x_val <= 0.0 || x_comp <= 0.0) return 0.0;
    return f(x_val, x_comp);
  };
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(g, lo, hi, 1e-12, &error, &l1);
  if (!std::isfinite(value) || error > 100.0 * abs_tol + 1e-12 * l1) {
    throw NumericalError("quadrature did not converge on [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "], error estimate " + std::to_string(error));
  }
  return value;
}

}  // namespace passk
