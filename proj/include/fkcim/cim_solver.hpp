#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fkcim/contours.hpp"
#include "fkcim/model.hpp"

namespace fkcim {

struct SolutionSample {
  double t = 0.0;
  double G1 = 0.0;
  double G2 = 0.0;
};

/// Laplace-space integrand evaluated once per node and reused for every
/// output time served by the contour.
struct PreparedIntegrand {
  Contour contour;
  double h = 0.0;
  bool literal_full_weight_k0 = false;
  std::vector<Complex> z;
  std::vector<Complex> v1;  // G1hat(z_k) z'_k
  std::vector<Complex> v2;  // G2hat(z_k) z'_k
};

using LaplaceFunction = std::function<LaplaceValue(Complex)>;

PreparedIntegrand prepare(const Model& model, const Contour& contour, bool literal_full_weight_k0 = false);
PreparedIntegrand prepare(const LaplaceFunction& fn, const Contour& contour, bool literal_full_weight_k0 = false);

/// Trapezoid rule on the folded contour integral; the phi = 0 node carries
/// half weight unless the prepared integrand asks for the literal full weight.
/// Throws OverflowError when Re(z_k) t > 700.
SolutionSample evaluate(const PreparedIntegrand& prepared, double t);
std::vector<SolutionSample> evaluate(const PreparedIntegrand& prepared, std::span<const double> times);

/// 100 eps exp(max_k Re(z_k) t1): accuracy attainable given the size of the
/// largest quadrature term.
double roundoff_floor(const Contour& contour, double t1);

struct SolveOptions {
  double a = kDefaultStripA;
  double delta = kDefaultDelta;
  D2Formula d2_formula = D2Formula::max;
  bool literal_full_weight_k0 = false;
};

struct ContourReport {
  ContourCheck check;
  bool box_check_passed = false;
  std::string box_error;  // set when the box check itself raised
  std::optional<PoleCertificate> certificate;
};

/// Optimal contour for [t0, t1], accepted if it clears the singular box or,
/// failing that, if the region it cuts off is certified free of poles.
/// Throws ContourInvalid when neither holds.
Contour window_contour(const Model& model, ContourKind kind, int N, double t0, double t1,
                       const SolveOptions& options, ContourReport* report = nullptr);

struct WindowSolution {
  Contour contour;
  ContourReport report;
  std::vector<SolutionSample> samples;
  std::vector<std::string> warnings;
};

WindowSolution solve_window(const FkParams& params, ContourKind kind, int N, double t0, double t1,
                            std::span<const double> times, const SolveOptions& options = {});

/// Consecutive windows [s, Lambda s] covering [t_min, t_max]. The last window
/// keeps the full ratio and may extend past t_max.
std::vector<std::pair<double, double>> partition_windows(double t_min, double t_max, double Lambda);

struct ErrorPoint {
  int N = 0;
  double error = 0.0;
  double floor = 0.0;  // points with error <= floor are ignored
};

struct DecayFit {
  double rate = 0.0;       // c in error ~ C exp(-c N)
  double log_coeff = 0.0;  // ln C
  std::size_t used = 0;
};

/// Least-squares fit of ln(error) against N. Throws InsufficientData with
/// fewer than four usable points.
DecayFit error_decay_fit(std::span<const ErrorPoint> points);

}  // namespace fkcim
