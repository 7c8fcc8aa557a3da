#pragma once

#include <span>
#include <vector>

#include "fkcim/cim_solver.hpp"
#include "fkcim/model.hpp"

namespace fkcim {

struct OccupationConfig {
  int state = 1;      // which internal state's occupation time
  double eps1 = 0.5;  // stationary weights used by the theory curve
  double eps2 = 0.5;
  double alpha = 0.5;  // shared fractional order
  std::vector<double> times;
};

struct OccupationSample {
  double t = 0.0;
  double A_mean = 0.0;
};

/// `base` with alpha1 = alpha2 = config.alpha, rho = 0 and U = (1, 0) for
/// state 1 or (0, 1) for state 2.
FkParams occupation_params(const OccupationConfig& config, const FkParams& base);

/// Mean occupation time <A>(t) = -d/drho (G1 + G2) at rho = 0, by contour
/// quadrature of the closed-form rho-derivative. Times are grouped into
/// consecutive windows [s, Lambda s], each with its own contour.
std::vector<OccupationSample> occupation_average(const OccupationConfig& config, const FkParams& base, int N,
                                                 double Lambda, ContourKind kind = ContourKind::hyperbolic,
                                                 const SolveOptions& options = {});

/// Long-time fraction of the elapsed time spent in `state`:
/// C_other / (C1 + C2). Multiplied by G10 + G20 it is the slope of <A>(t).
double asymptotic_occupation_fraction(const FkParams& params, int state);

/// eps_state / (eps1 + eps2).
double theory_fraction(const OccupationConfig& config);

struct AsymptoteFit {
  double slope = 0.0;
  double coefficient = 0.0;  // exp(intercept) of the log-log line
};

/// Least squares in log-log space. Needs at least 5 positive samples spanning
/// at least two decades of t; throws InsufficientData otherwise.
AsymptoteFit asymptote_fit(std::span<const OccupationSample> samples);

}  // namespace fkcim
