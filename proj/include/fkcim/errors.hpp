#pragma once

#include <stdexcept>
#include <string>

namespace fkcim {

// Base for every failure the solvers report. Each subclass maps onto one
// CLI exit code (see tools/cli/commands.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter set or configuration violates an invariant.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Denominator of H(z) underflowed: the evaluation point sits on (or next to)
// a singularity of the Laplace-space solution.
class PoleError : public Error {
 public:
  using Error::Error;
};

// Contour parameters cannot be realized (empty feasible interval, negative
// radicand, ...).
class InfeasibleGeometry : public Error {
 public:
  using Error::Error;
};

// Contour does not clear the singular region of H(z).
class ContourInvalid : public Error {
 public:
  using Error::Error;
};

// exp(z_k t) would overflow a double.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// The 2x2 time-marching system is (numerically) singular.
class SingularStep : public Error {
 public:
  using Error::Error;
};

// Not enough usable samples for a fit.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

}  // namespace fkcim
