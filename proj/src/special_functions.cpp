#include "fkcim/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fkcim::special {

Complex complex_pow(Complex z, double alpha) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || !std::isfinite(alpha)) {
    throw std::domain_error("complex_pow: non-finite argument");
  }
  const double r = std::abs(z);
  if (r == 0.0) {
    if (alpha <= 0.0) throw std::domain_error("complex_pow: 0 raised to a non-positive power");
    return {0.0, 0.0};
  }
  double theta = std::arg(z);
  if (theta == -std::numbers::pi) theta = std::numbers::pi;
  return std::polar(std::pow(r, alpha), alpha * theta);
}

double lower_incomplete_gamma_at_one(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("lower_incomplete_gamma_at_one: alpha must be positive");
  // x^a e^-x sum_n x^n / (a (a+1) ... (a+n)) at x = 1; terms are positive and
  // decay factorially.
  double term = 1.0 / alpha;
  double sum = term;
  for (int n = 1; n < 200; ++n) {
    term /= alpha + n;
    sum += term;
    if (term < 1e-17) break;
  }
  return sum * std::exp(-1.0);
}

double gamma_fn(double alpha) {
  if (!(alpha > 0.0)) throw std::domain_error("gamma_fn: alpha must be positive");
  return std::tgamma(alpha);
}

double arccosh(double x) {
  if (!(x >= 1.0)) throw std::domain_error("arccosh: argument below 1");
  return std::acosh(x);
}

}  // namespace fkcim::special
