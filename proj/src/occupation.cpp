#include "fkcim/occupation.hpp"

#include <algorithm>
#include <cmath>

#include "fkcim/errors.hpp"

namespace fkcim {

namespace {

void check_config(const OccupationConfig& config) {
  if (config.state != 1 && config.state != 2) throw InvalidParameter("occupation state must be 1 or 2");
  if (!(config.eps1 >= 0.0) || !(config.eps2 >= 0.0) || !(config.eps1 + config.eps2 > 0.0)) {
    throw InvalidParameter("occupation weights must be non-negative with a positive sum");
  }
  if (!std::is_sorted(config.times.begin(), config.times.end())) {
    throw InvalidParameter("occupation times must be ascending");
  }
  for (double t : config.times) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter("occupation times must be positive");
  }
}

}  // namespace

FkParams occupation_params(const OccupationConfig& config, const FkParams& base) {
  check_config(config);
  FkParams p = base;
  p.alpha1 = config.alpha;
  p.alpha2 = config.alpha;
  p.rho = 0.0;
  p.U1 = config.state == 1 ? 1.0 : 0.0;
  p.U2 = config.state == 2 ? 1.0 : 0.0;
  validate(p);
  return p;
}

std::vector<OccupationSample> occupation_average(const OccupationConfig& config, const FkParams& base, int N,
                                                 double Lambda, ContourKind kind, const SolveOptions& options) {
  const FkParams params = occupation_params(config, base);
  std::vector<OccupationSample> out;
  if (config.times.empty()) return out;
  out.reserve(config.times.size());

  const Model model(params);
  const LaplaceFunction integrand = [&model](Complex z) {
    const LaplaceValue d = model.dg_hat_drho(z);
    return LaplaceValue{-(d.G1hat + d.G2hat), Complex(0.0, 0.0)};
  };

  std::size_t next = 0;
  for (const auto& [t0, t1] : partition_windows(config.times.front(), config.times.back(), Lambda)) {
    if (next < config.times.size() && config.times[next] > t1) continue;
    const Contour contour = window_contour(model, kind, N, t0, t1, options);
    const PreparedIntegrand prepared = prepare(integrand, contour, options.literal_full_weight_k0);
    while (next < config.times.size() && config.times[next] <= t1) {
      const double t = config.times[next++];
      out.push_back({t, evaluate(prepared, t).G1});
    }
  }
  return out;
}

double asymptotic_occupation_fraction(const FkParams& params, int state) {
  if (state != 1 && state != 2) throw InvalidParameter("occupation state must be 1 or 2");
  const DerivedCoeffs c = derive_coeffs(params);
  const double total = c.C1 + c.C2;
  if (total == 0.0) throw InvalidParameter("uncoupled chain has no stationary occupation fraction");
  return (state == 1 ? c.C2 : c.C1) / total;
}

double theory_fraction(const OccupationConfig& config) {
  check_config(config);
  return (config.state == 1 ? config.eps1 : config.eps2) / (config.eps1 + config.eps2);
}

AsymptoteFit asymptote_fit(std::span<const OccupationSample> samples) {
  if (samples.size() < 5) throw InsufficientData("asymptote fit needs at least 5 samples");
  double t_min = samples.front().t;
  double t_max = samples.front().t;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const OccupationSample& s : samples) {
    if (!(s.t > 0.0) || !(s.A_mean > 0.0)) throw InsufficientData("asymptote fit needs positive samples");
    t_min = std::min(t_min, s.t);
    t_max = std::max(t_max, s.t);
    const double x = std::log(s.t);
    const double y = std::log(s.A_mean);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (t_max < 100.0 * t_min * (1.0 - 1e-12)) throw InsufficientData("asymptote fit needs two decades of t");
  const double n = static_cast<double>(samples.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, std::exp((sy - slope * sx) / n)};
}

}  // namespace fkcim
