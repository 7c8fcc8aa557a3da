#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fkcim/model.hpp"

namespace fkcim {

/// z(phi) = eta (i phi + 1)^2.
struct ParabolicContour {
  double eta = 0.0;
  double h = 0.0;
  double a = 0.0;  // strip parameter, 1/4 < a < 1
  int N = 0;
};

/// z(phi) = eta (1 + sin(i phi - alpha)).
struct HyperbolicContour {
  double eta = 0.0;
  double h = 0.0;
  double alpha = 0.0;  // asymptote half-angle
  double delta = 0.0;
  int N = 0;
};

using Contour = std::variant<ParabolicContour, HyperbolicContour>;

enum class ContourKind { parabolic, hyperbolic };

struct ContourNode {
  Complex z;
  Complex dz;  // z'(phi)
  double phi = 0.0;
};

inline constexpr double kDefaultStripA = 0.9875;
inline constexpr double kDefaultDelta = 0.1123;

ContourKind kind_of(const Contour& contour);
int node_count(const Contour& contour);
double node_spacing(const Contour& contour);
double contour_scale(const Contour& contour);  // eta

Complex contour_point(const Contour& contour, double phi);
Complex contour_derivative(const Contour& contour, double phi);

/// Nodes phi_k = k h, k = 0 .. N-1, in ascending order.
std::vector<ContourNode> nodes(const Contour& contour);

// ---- parabolic parameter selection ----------------------------------------

/// q = 1 + a - sqrt(a^2 + 2a).
double parabolic_q(double a);

/// Theoretical decay rate of the error in N for the window ratio Lambda.
double parabolic_decay_rate(double a, double Lambda);

ParabolicContour parabolic_optimal(double a, double Lambda, double t1, int N);

// ---- hyperbolic parameter selection ---------------------------------------

/// Feasible open interval for the asymptote angle, inset by 1e-6 at both ends.
struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

AlphaInterval hyperbolic_alpha_interval(double delta);
double hyperbolic_A(double alpha, double delta, double Lambda);
double hyperbolic_Q(double alpha, double delta, double Lambda);

/// Golden-section maximizer of Q over the feasible interval.
double hyperbolic_optimal_alpha(double delta, double Lambda);

HyperbolicContour hyperbolic_optimal(double delta, double Lambda, double t1, int N);

/// Build the optimal contour of the requested kind for the window [t1/Lambda, t1].
Contour optimal_contour(ContourKind kind, double shape, double Lambda, double t1, int N);

// ---- validity --------------------------------------------------------------

struct ContourCheck {
  bool passed = false;
  // Parabolic: limit = a_max, margin = a_max - a, clearance = eta(1 - d2^2/(4 eta^2)) - d1.
  // Hyperbolic: limit = delta_min, margin = delta - delta_min, clearance = eta - max(d1, 0).
  double limit = 0.0;
  double margin = 0.0;
  double clearance = 0.0;
  std::string detail;
};

ContourCheck validate_parabolic(const ParabolicContour& contour, const AnalyticityBounds& bounds);
ContourCheck validate_hyperbolic(const HyperbolicContour& contour, const AnalyticityBounds& bounds);
ContourCheck validate_contour(const Contour& contour, const AnalyticityBounds& bounds);

/// Argument-principle check that the denominator of H has no zero between
/// the contour and the circle of radius `radius` (chosen beyond
/// pole_free_radius, where no zero can exist).
struct PoleCertificate {
  bool passed = false;
  int winding = 0;
  double radius = 0.0;
  std::size_t evaluations = 0;
  std::string detail;
};

PoleCertificate certify_pole_free(const Model& model, const Contour& contour);

}  // namespace fkcim
