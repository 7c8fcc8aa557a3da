#pragma once

#include <complex>

namespace fkcim {

using Complex = std::complex<double>;

namespace special {

/// Principal-branch power exp(alpha * (ln|z| + i arg z)) with arg z in (-pi, pi].
/// A signed-zero imaginary part never moves z onto the lower lip of the cut:
/// -1 - 0i is treated like -1 + 0i.
/// complex_pow(0, alpha) is 0 for alpha > 0 and a domain error otherwise.
Complex complex_pow(Complex z, double alpha);

/// gamma(alpha, 1) = int_0^1 s^(alpha-1) e^(-s) ds for alpha > 0.
double lower_incomplete_gamma_at_one(double alpha);

/// Gamma(alpha) for alpha > 0.
double gamma_fn(double alpha);

/// ln(x + sqrt(x^2 - 1)) for x >= 1.
double arccosh(double x);

}  // namespace special
}  // namespace fkcim
