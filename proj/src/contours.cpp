#include "fkcim/contours.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "fkcim/errors.hpp"

namespace fkcim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAlphaInset = 1e-6;
constexpr double kGoldenTol = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void check_window(double Lambda, double t1, int N) {
  if (!(Lambda >= 1.0) || !std::isfinite(Lambda)) throw InvalidParameter("Lambda must be >= 1");
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw InvalidParameter("t1 must be positive");
  if (N < 2) throw InvalidParameter("contour needs at least 2 nodes");
}

}  // namespace

ContourKind kind_of(const Contour& contour) {
  return std::holds_alternative<ParabolicContour>(contour) ? ContourKind::parabolic
                                                           : ContourKind::hyperbolic;
}

int node_count(const Contour& contour) {
  return std::visit([](const auto& c) { return c.N; }, contour);
}

double node_spacing(const Contour& contour) {
  return std::visit([](const auto& c) { return c.h; }, contour);
}

double contour_scale(const Contour& contour) {
  return std::visit([](const auto& c) { return c.eta; }, contour);
}

Complex contour_point(const Contour& contour, double phi) {
  return std::visit(
      overloaded{
          [phi](const ParabolicContour& c) { return Complex(c.eta * (1.0 - phi * phi), 2.0 * c.eta * phi); },
          [phi](const HyperbolicContour& c) {
            return Complex(c.eta * (1.0 - std::sin(c.alpha) * std::cosh(phi)),
                           c.eta * std::cos(c.alpha) * std::sinh(phi));
          },
      },
      contour);
}

Complex contour_derivative(const Contour& contour, double phi) {
  return std::visit(
      overloaded{
          [phi](const ParabolicContour& c) { return Complex(-2.0 * c.eta * phi, 2.0 * c.eta); },
          [phi](const HyperbolicContour& c) {
            return Complex(-c.eta * std::sin(c.alpha) * std::sinh(phi),
                           c.eta * std::cos(c.alpha) * std::cosh(phi));
          },
      },
      contour);
}

std::vector<ContourNode> nodes(const Contour& contour) {
  const int N = node_count(contour);
  const double h = node_spacing(contour);
  std::vector<ContourNode> out;
  out.reserve(static_cast<std::size_t>(std::max(N, 0)));
  for (int k = 0; k < N; ++k) {
    const double phi = k * h;
    out.push_back({contour_point(contour, phi), contour_derivative(contour, phi), phi});
  }
  return out;
}

double parabolic_q(double a) { return 1.0 + a - std::sqrt(a * a + 2.0 * a); }

double parabolic_decay_rate(double a, double Lambda) {
  const double q = parabolic_q(a);
  const double radicand = q * q * (1.0 - Lambda) + 2.0 * a * Lambda * q;
  if (!(radicand > 0.0)) throw InfeasibleGeometry("parabolic window ratio too large for a");
  return kPi * (q - 2.0 * a) * std::sqrt(radicand) / (q * (Lambda - 1.0) - 2.0 * a * Lambda);
}

ParabolicContour parabolic_optimal(double a, double Lambda, double t1, int N) {
  if (!(a > 0.25 && a < 1.0)) throw InvalidParameter("parabolic strip parameter a must lie in (1/4, 1)");
  check_window(Lambda, t1, N);
  const double q = parabolic_q(a);
  const double radicand = q * q * (1.0 - Lambda) + 2.0 * a * Lambda * q;
  const double denom = q * (1.0 - Lambda) + 2.0 * a * Lambda;
  if (!(radicand > 0.0) || !(denom > 0.0)) {
    std::ostringstream msg;
    msg << "parabolic contour infeasible for Lambda=" << Lambda << " and a=" << a;
    throw InfeasibleGeometry(msg.str());
  }
  const double root = std::sqrt(radicand);
  ParabolicContour c;
  c.a = a;
  c.N = N;
  c.eta = kPi * q * root / denom * N / t1;
  c.h = root / q / N;
  return c;
}

AlphaInterval hyperbolic_alpha_interval(double delta) {
  if (!(delta > 0.0 && delta < kPi / 2.0)) throw InvalidParameter("delta must lie in (0, pi/2)");
  AlphaInterval iv{(kPi - 2.0 * delta) / 4.0 + kAlphaInset, kPi / 2.0 - delta - kAlphaInset};
  if (!(iv.lo < iv.hi)) throw InfeasibleGeometry("no feasible hyperbolic asymptote angle for this delta");
  return iv;
}

double hyperbolic_A(double alpha, double delta, double Lambda) {
  const double base = 4.0 * alpha - kPi + 2.0 * delta;
  const double arg = ((kPi - 2.0 * alpha - 2.0 * delta) * Lambda + base) / (base * std::sin(alpha));
  if (!(base > 0.0) || !(arg >= 1.0)) throw InfeasibleGeometry("hyperbolic arccosh argument below 1");
  return special::arccosh(arg);
}

double hyperbolic_Q(double alpha, double delta, double Lambda) {
  return (kPi * kPi - 2.0 * kPi * alpha - 2.0 * kPi * delta) / hyperbolic_A(alpha, delta, Lambda);
}

double hyperbolic_optimal_alpha(double delta, double Lambda) {
  const AlphaInterval iv = hyperbolic_alpha_interval(delta);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = iv.lo;
  double hi = iv.hi;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = hyperbolic_Q(x1, delta, Lambda);
  double f2 = hyperbolic_Q(x2, delta, Lambda);
  while (hi - lo > kGoldenTol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = hyperbolic_Q(x2, delta, Lambda);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = hyperbolic_Q(x1, delta, Lambda);
    }
  }
  return 0.5 * (lo + hi);
}

HyperbolicContour hyperbolic_optimal(double delta, double Lambda, double t1, int N) {
  check_window(Lambda, t1, N);
  const double alpha = hyperbolic_optimal_alpha(delta, Lambda);
  const double A = hyperbolic_A(alpha, delta, Lambda);
  HyperbolicContour c;
  c.alpha = alpha;
  c.delta = delta;
  c.N = N;
  c.h = A / N;
  c.eta = (4.0 * kPi * alpha - kPi * kPi + 2.0 * kPi * delta) / A * N / t1;
  return c;
}

Contour optimal_contour(ContourKind kind, double shape, double Lambda, double t1, int N) {
  if (kind == ContourKind::parabolic) return parabolic_optimal(shape, Lambda, t1, N);
  return hyperbolic_optimal(shape, Lambda, t1, N);
}

ContourCheck validate_parabolic(const ParabolicContour& contour, const AnalyticityBounds& bounds) {
  const double eta = contour.eta;
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ContourInvalid("parabolic contour scale must be positive");
  const double d1p = std::max(bounds.d1, 0.0);
  const double d2 = bounds.d2;
  ContourCheck r;
  r.limit = 1.0 - std::sqrt((d1p + std::sqrt(d1p * d1p + d2 * d2)) / (2.0 * eta));
  r.margin = r.limit - contour.a;
  r.clearance = eta * (1.0 - d2 * d2 / (4.0 * eta * eta)) - bounds.d1;
  r.passed = contour.a <= r.limit && r.clearance > 0.0;
  std::ostringstream msg;
  msg << "parabolic: a=" << contour.a << " a_max=" << r.limit << " clearance=" << r.clearance;
  r.detail = msg.str();
  return r;
}

ContourCheck validate_hyperbolic(const HyperbolicContour& contour, const AnalyticityBounds& bounds) {
  const double d1p = std::max(bounds.d1, 0.0);
  if (!(contour.eta > d1p)) {
    std::ostringstream msg;
    msg << "hyperbolic contour scale eta=" << contour.eta << " does not exceed d1=" << d1p;
    throw ContourInvalid(msg.str());
  }
  ContourCheck r;
  r.clearance = contour.eta - d1p;
  r.limit = std::atan(bounds.d2 / r.clearance);
  r.margin = contour.delta - r.limit;
  r.passed = contour.delta >= r.limit;
  std::ostringstream msg;
  msg << "hyperbolic: delta=" << contour.delta << " delta_min=" << r.limit;
  r.detail = msg.str();
  return r;
}

ContourCheck validate_contour(const Contour& contour, const AnalyticityBounds& bounds) {
  return std::visit(
      overloaded{
          [&](const ParabolicContour& c) { return validate_parabolic(c, bounds); },
          [&](const HyperbolicContour& c) { return validate_hyperbolic(c, bounds); },
      },
      contour);
}

namespace {

// Total change of arg f along s in [0, 1], refining any step whose increment
// exceeds pi/8. Returns false if f vanishes or refinement runs out.
bool accumulate_arg(const std::function<Complex(double)>& f, int base, double& total, std::size_t& evals) {
  constexpr double kMaxStep = kPi / 8.0;
  constexpr int kMaxDepth = 40;
  struct Piece {
    double s0, s1;
    Complex f0, f1;
    int depth;
  };
  auto eval = [&](double s) {
    ++evals;
    return f(s);
  };
  std::vector<Piece> stack;
  Complex prev = eval(0.0);
  if (!(std::abs(prev) > 1e-300)) return false;
  for (int i = 0; i < base; ++i) {
    const double s1 = static_cast<double>(i + 1) / base;
    const Complex next = eval(s1);
    if (!(std::abs(next) > 1e-300)) return false;
    stack.push_back({static_cast<double>(i) / base, s1, prev, next, 0});
    while (!stack.empty()) {
      const Piece p = stack.back();
      stack.pop_back();
      const double step = std::arg(p.f1 / p.f0);
      if (std::abs(step) <= kMaxStep) {
        total += step;
        continue;
      }
      if (p.depth >= kMaxDepth) return false;
      const double sm = 0.5 * (p.s0 + p.s1);
      const Complex fm = eval(sm);
      if (!(std::abs(fm) > 1e-300)) return false;
      stack.push_back({sm, p.s1, fm, p.f1, p.depth + 1});
      stack.push_back({p.s0, sm, p.f0, fm, p.depth + 1});
    }
    prev = next;
  }
  return true;
}

}  // namespace

PoleCertificate certify_pole_free(const Model& model, const Contour& contour) {
  PoleCertificate cert;
  cert.radius = 1.1 * pole_free_radius(model.params());
  const double eta = contour_scale(contour);
  const double R = cert.radius;
  if (std::abs(contour_point(contour, 0.0)) >= R) {
    cert.passed = true;
    cert.detail = "contour lies outside the pole-free radius";
    return cert;
  }
  // |z(phi)| grows monotonically in |phi| on both contours.
  double phiR = 0.0;
  if (std::holds_alternative<ParabolicContour>(contour)) {
    phiR = std::sqrt(R / eta - 1.0);
  } else {
    const auto& hc = std::get<HyperbolicContour>(contour);
    phiR = std::acosh(R / eta + std::sin(hc.alpha));
  }
  const Complex zR = contour_point(contour, phiR);
  const double thetaR = std::arg(zR);

  auto on_contour = [&](double s) { return model.denominator(contour_point(contour, -phiR + 2.0 * phiR * s)); };
  auto on_arc = [&](double s) { return model.denominator(std::polar(R, thetaR - 2.0 * thetaR * s)); };

  constexpr int kBase = 256;
  double total = 0.0;
  const bool ok = accumulate_arg(on_contour, kBase, total, cert.evaluations) &&
                  accumulate_arg(on_arc, kBase, total, cert.evaluations);
  if (!ok) {
    cert.detail = "denominator vanishes or varies too fast on the certification path";
    return cert;
  }
  cert.winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
  cert.passed = cert.winding == 0;
  std::ostringstream msg;
  msg << "winding number " << cert.winding << " inside radius " << R;
  cert.detail = msg.str();
  return cert;
}

}  // namespace fkcim
