#include "fkcim/time_marching.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fkcim/errors.hpp"

namespace fkcim {

TmGrid make_grid(double T, int M) {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParameter("final time T must be positive");
  if (M < 1) throw InvalidParameter("step count M must be at least 1");
  return {T / M, M, T};
}

double tm_weight(int j, int n, double alpha, double rhoU, double h) {
  const double a1 = alpha + 1.0;
  if (j == 0) {
    const double nn = n;
    return std::exp(-rhoU * (n + 1) * h) * (std::pow(nn, a1) - std::pow(nn + 1.0, alpha) * (nn - alpha));
  }
  const double k = n - j;
  return std::exp(-rhoU * (k + 1.0) * h) *
         (std::pow(k + 2.0, a1) + std::pow(k, a1) - 2.0 * std::pow(k + 1.0, a1));
}

std::size_t TimeMarcher::index(int state) {
  if (state != 1 && state != 2) throw std::out_of_range("state must be 1 or 2");
  return static_cast<std::size_t>(state - 1);
}

TimeMarcher::TimeMarcher(const FkParams& params, const TmGrid& grid, TmOptions options)
    : params_(params), coeffs_(derive_coeffs(params)), grid_(grid), options_(options) {
  if (grid.M < 1 || !(grid.h > 0.0)) throw InvalidParameter("invalid time grid");
  alpha_ = {params.alpha1, params.alpha2};
  rhoU_ = {params.rho * params.U1, params.rho * params.U2};
  C_ = {coeffs_.C1, coeffs_.C2};
  const double h = grid.h;
  for (std::size_t m = 0; m < 2; ++m) {
    const double a = alpha_[m];
    const double gamma_a = special::gamma_fn(a);
    c_[m] = std::pow(h, a) / (a * (a + 1.0) * gamma_a);
    literal_[m] = rhoU_[m] == 0.0
                      ? 0.0
                      : std::pow(rhoU_[m], 1.0 - a) * special::lower_incomplete_gamma_at_one(a) / gamma_a;
    kernel_[m].resize(static_cast<std::size_t>(grid.M));
    for (int k = 0; k < grid.M; ++k) kernel_[m][static_cast<std::size_t>(k)] = tm_weight(1, k + 1, a, rhoU_[m], h);
    G_[m].reserve(static_cast<std::size_t>(grid.M) + 1);
    conv_[m].reserve(static_cast<std::size_t>(grid.M) + 1);
  }
  G_[0].push_back(params.G10);
  G_[1].push_back(params.G20);
  conv_[0].push_back(0.0);
  conv_[1].push_back(0.0);
  trap_G_ = {0.5 * h * params.G10, 0.5 * h * params.G20};
  trap_conv_ = {0.0, 0.0};
}

// c * sum_{j=0}^{n} d_{j,n} G_j: the known part of the convolution at t_{n+1}.
double TimeMarcher::convolution(std::size_t m) const {
  const int n = n_;
  const std::vector<double>& g = G_[m];
  const std::vector<double>& kern = kernel_[m];
  double s = tm_weight(0, n, alpha_[m], rhoU_[m], grid_.h) * g[0];
  for (int j = 1; j <= n; ++j) {
    s = std::fma(kern[static_cast<std::size_t>(n - j)], g[static_cast<std::size_t>(j)], s);
  }
  return c_[m] * s;
}

SolutionSample TimeMarcher::step() {
  if (done()) throw std::logic_error("time marching already reached the final step");
  const double h = grid_.h;
  std::array<double, 2> S{}, F{}, f{};
  for (std::size_t m = 0; m < 2; ++m) {
    S[m] = convolution(m);
    // Total history term J_m = F_m + f_m G_m(t_{n+1}).
    if (options_.history == HistoryTerm::convolution_trapezoid) {
      F[m] = S[m] + rhoU_[m] * (trap_conv_[m] + 0.5 * h * S[m]);
      f[m] = c_[m] * (1.0 + 0.5 * h * rhoU_[m]);
    } else {
      F[m] = S[m] + literal_[m] * trap_G_[m];
      f[m] = c_[m] + 0.5 * h * literal_[m];
    }
  }

  const double a11 = 1.0 - C_[0] * f[0] + 0.5 * h * rhoU_[0];
  const double a12 = C_[1] * f[1];
  const double a21 = C_[0] * f[0];
  const double a22 = 1.0 - C_[1] * f[1] + 0.5 * h * rhoU_[1];
  assert(std::abs(a11) > std::abs(a12) && std::abs(a22) > std::abs(a21));
  const double r1 = C_[0] * F[0] - C_[1] * F[1] - rhoU_[0] * trap_G_[0] + params_.G10;
  const double r2 = C_[1] * F[1] - C_[0] * F[0] - rhoU_[1] * trap_G_[1] + params_.G20;

  const double det = a11 * a22 - a12 * a21;
  const double scale = std::abs(a11 * a22) + std::abs(a12 * a21);
  if (!(std::abs(det) >= 1e-14 * scale) || !std::isfinite(det)) {
    std::ostringstream msg;
    msg << "time-marching step " << n_ + 1 << " is singular (det=" << det << "); use a smaller step h";
    throw SingularStep(msg.str());
  }
  const double g1 = (r1 * a22 - a12 * r2) / det;
  const double g2 = (a11 * r2 - a21 * r1) / det;

  const std::array<double, 2> g{g1, g2};
  for (std::size_t m = 0; m < 2; ++m) {
    const double conv = S[m] + c_[m] * g[m];
    // Trapezoid sums through t_{n+1}, with the newest point at full weight,
    // ready for the next step.
    trap_G_[m] += h * g[m];
    trap_conv_[m] += h * conv;
    G_[m].push_back(g[m]);
    conv_[m].push_back(conv);
  }
  ++n_;
  return {n_ * h, g1, g2};
}

double TimeMarcher::recompute_trapezoid_sum(int state) const {
  const std::vector<double>& g = G_[index(state)];
  double s = 0.5 * g[0];
  for (std::size_t i = 1; i < g.size(); ++i) s += g[i];
  return grid_.h * s;
}

std::pair<double, double> tm_first_step(const FkParams& params, double h, TmOptions options) {
  TimeMarcher tm(params, make_grid(h, 1), options);
  const SolutionSample s = tm.step();
  return {s.G1, s.G2};
}

std::vector<SolutionSample> tm_solve(const FkParams& params, const TmGrid& grid, TmOptions options) {
  TimeMarcher tm(params, grid, options);
  std::vector<SolutionSample> out;
  out.reserve(static_cast<std::size_t>(grid.M) + 1);
  out.push_back({0.0, params.G10, params.G20});
  while (!tm.done()) out.push_back(tm.step());
  return out;
}

TmReference::TmReference(const FkParams& params, double T, int M, TmOptions options)
    : grid_(make_grid(T, M)), samples_(tm_solve(params, grid_, options)) {}

SolutionSample TmReference::value_at(double t) const {
  if (!(t >= 0.0 && t <= grid_.T)) {
    std::ostringstream msg;
    msg << "t=" << t << " outside the reference range [0, " << grid_.T << "]";
    throw std::out_of_range(msg.str());
  }
  const double x = t / grid_.h;
  const auto i = static_cast<std::size_t>(std::min<double>(std::floor(x), grid_.M));
  const double frac = x - static_cast<double>(i);
  if (i >= static_cast<std::size_t>(grid_.M) || frac == 0.0) {
    SolutionSample s = samples_[i];
    s.t = t;
    return s;
  }
  const SolutionSample& lo = samples_[i];
  const SolutionSample& hi = samples_[i + 1];
  return {t, lo.G1 + frac * (hi.G1 - lo.G1), lo.G2 + frac * (hi.G2 - lo.G2)};
}

}  // namespace fkcim
