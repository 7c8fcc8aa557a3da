#include "fkcim/cim_solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fkcim/errors.hpp"

namespace fkcim {

namespace {

constexpr double kExpLimit = 700.0;

// Neumaier's variant of compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

PreparedIntegrand prepare(const LaplaceFunction& fn, const Contour& contour, bool literal_full_weight_k0) {
  PreparedIntegrand out;
  out.contour = contour;
  out.h = node_spacing(contour);
  out.literal_full_weight_k0 = literal_full_weight_k0;
  const std::vector<ContourNode> ns = nodes(contour);
  out.z.reserve(ns.size());
  out.v1.reserve(ns.size());
  out.v2.reserve(ns.size());
  for (const ContourNode& n : ns) {
    const LaplaceValue g = fn(n.z);
    out.z.push_back(n.z);
    out.v1.push_back(g.G1hat * n.dz);
    out.v2.push_back(g.G2hat * n.dz);
  }
  return out;
}

PreparedIntegrand prepare(const Model& model, const Contour& contour, bool literal_full_weight_k0) {
  return prepare([&model](Complex z) { return model.g_hat(z); }, contour, literal_full_weight_k0);
}

SolutionSample evaluate(const PreparedIntegrand& prepared, double t) {
  CompensatedSum s1;
  CompensatedSum s2;
  for (std::size_t k = 0; k < prepared.z.size(); ++k) {
    const Complex z = prepared.z[k];
    const double growth = z.real() * t;
    if (growth > kExpLimit) {
      std::ostringstream msg;
      msg << "exp(z_k t) overflows at node k=" << k << " (Re z_k * t = " << growth
          << "); use a smaller Lambda or split the time window";
      throw OverflowError(msg.str());
    }
    const double weight = (k == 0 && !prepared.literal_full_weight_k0) ? 0.5 : 1.0;
    const double mag = weight * std::exp(growth);
    const double c = std::cos(z.imag() * t);
    const double s = std::sin(z.imag() * t);
    const Complex a = prepared.v1[k];
    const Complex b = prepared.v2[k];
    s1.add(mag * (c * a.imag() + s * a.real()));
    s2.add(mag * (c * b.imag() + s * b.real()));
  }
  const double scale = prepared.h / std::numbers::pi;
  return {t, scale * s1.value(), scale * s2.value()};
}

std::vector<SolutionSample> evaluate(const PreparedIntegrand& prepared, std::span<const double> times) {
  std::vector<SolutionSample> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evaluate(prepared, t));
  return out;
}

double roundoff_floor(const Contour& contour, double t1) {
  return 100.0 * std::numeric_limits<double>::epsilon() * std::exp(contour_point(contour, 0.0).real() * t1);
}

Contour window_contour(const Model& model, ContourKind kind, int N, double t0, double t1,
                       const SolveOptions& options, ContourReport* report) {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw InvalidParameter("window start t0 must be positive");
  if (!(t1 >= t0) || !std::isfinite(t1)) throw InvalidParameter("window end t1 must be >= t0");
  const double shape = kind == ContourKind::parabolic ? options.a : options.delta;
  Contour contour = optimal_contour(kind, shape, t1 / t0, t1, N);

  ContourReport local;
  try {
    local.check = validate_contour(contour, analyticity_bounds(model.params(), options.d2_formula));
    local.box_check_passed = local.check.passed;
  } catch (const ContourInvalid& e) {
    local.box_error = e.what();
  }
  if (!local.box_check_passed) {
    local.certificate = certify_pole_free(model, contour);
    if (!local.certificate->passed) {
      std::ostringstream msg;
      msg << "contour does not clear the singular region of H(z): "
          << (local.box_error.empty() ? local.check.detail : local.box_error) << "; "
          << local.certificate->detail;
      throw ContourInvalid(msg.str());
    }
  }
  if (report) *report = local;
  return contour;
}

WindowSolution solve_window(const FkParams& params, ContourKind kind, int N, double t0, double t1,
                            std::span<const double> times, const SolveOptions& options) {
  const Model model(params);
  WindowSolution out;
  out.contour = window_contour(model, kind, N, t0, t1, options, &out.report);
  const PreparedIntegrand prepared = prepare(model, out.contour, options.literal_full_weight_k0);
  out.samples.reserve(times.size());
  for (double t : times) {
    if (t < t0 || t > t1) {
      std::ostringstream msg;
      msg << "t=" << t << " lies outside the design window [" << t0 << ", " << t1 << "]";
      out.warnings.push_back(msg.str());
    }
    out.samples.push_back(evaluate(prepared, t));
  }
  return out;
}

std::vector<std::pair<double, double>> partition_windows(double t_min, double t_max, double Lambda) {
  if (!(t_min > 0.0) || !(t_max >= t_min)) throw InvalidParameter("time range must satisfy 0 < t_min <= t_max");
  if (!(Lambda > 1.0)) {
    if (t_max == t_min) return {{t_min, t_max}};
    throw InvalidParameter("Lambda must exceed 1 to cover a time range");
  }
  std::vector<std::pair<double, double>> out;
  double start = t_min;
  while (true) {
    const double end = start * Lambda;
    out.emplace_back(start, end);
    if (end >= t_max * (1.0 - 1e-12)) break;
    start = end;
  }
  return out;
}

DecayFit error_decay_fit(std::span<const ErrorPoint> points) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (const ErrorPoint& p : points) {
    if (!(p.error > p.floor) || !(p.error > 0.0) || !std::isfinite(p.error)) continue;
    const double x = p.N;
    const double y = std::log(p.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 4) throw InsufficientData("decay fit needs at least 4 points above the round-off floor");
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  if (!(denom > 0.0)) throw InsufficientData("decay fit needs at least two distinct N");
  const double slope = (nn * sxy - sx * sy) / denom;
  DecayFit fit;
  fit.rate = -slope;
  fit.log_coeff = (sy - slope * sx) / nn;
  fit.used = n;
  return fit;
}

}  // namespace fkcim
