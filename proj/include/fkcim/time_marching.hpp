#pragma once

#include <array>
#include <utility>
#include <vector>

#include "fkcim/cim_solver.hpp"
#include "fkcim/model.hpp"

namespace fkcim {

struct TmGrid {
  double h = 0.0;
  int M = 0;
  double T = 0.0;
};

TmGrid make_grid(double T, int M);

/// Convolution weight d_{j,n} for the tempered fractional kernel with
/// linear interpolation of the integrand on [t_j, t_{j+1}].
double tm_weight(int j, int n, double alpha, double rhoU, double h);

/// Discretization of the rho U int_0^t (K * G) term.
enum class HistoryTerm {
  convolution_trapezoid,  // trapezoid rule over the stored convolution values
  gamma_at_one,           // (rho U)^(1-alpha) gamma(alpha, 1) / Gamma(alpha) times the trapezoid of G
};

struct TmOptions {
  HistoryTerm history = HistoryTerm::convolution_trapezoid;
};

/// Step-by-step solver of the integral form of the two-state system.
/// Stores the full history; step n costs O(n).
class TimeMarcher {
 public:
  TimeMarcher(const FkParams& params, const TmGrid& grid, TmOptions options = {});

  int steps_taken() const { return n_; }
  bool done() const { return n_ >= grid_.M; }
  const TmGrid& grid() const { return grid_; }

  /// Advance one step and return the new sample. Throws SingularStep.
  SolutionSample step();

  const std::vector<double>& history(int state) const { return G_[index(state)]; }

  /// h/2 G_0 + h sum_{i=1}^{n} G_i, maintained incrementally.
  double trapezoid_sum(int state) const { return trap_G_[index(state)]; }
  /// Same quantity recomputed from the stored history.
  double recompute_trapezoid_sum(int state) const;

 private:
  static std::size_t index(int state);
  double convolution(std::size_t m) const;

  FkParams params_;
  DerivedCoeffs coeffs_;
  TmGrid grid_;
  TmOptions options_;
  int n_ = 0;

  std::array<double, 2> alpha_{};
  std::array<double, 2> rhoU_{};
  std::array<double, 2> C_{};
  std::array<double, 2> c_{};        // h^a / (a (a+1) Gamma(a))
  std::array<double, 2> literal_{};  // (rho U)^(1-a) gamma(a,1) / Gamma(a)
  std::array<std::vector<double>, 2> kernel_;  // d_{n-k, n} for k = n - j >= 0, j >= 1
  std::array<std::vector<double>, 2> G_;
  std::array<std::vector<double>, 2> conv_;    // convolution values at t_i
  std::array<double, 2> trap_G_{};
  std::array<double, 2> trap_conv_{};
};

std::pair<double, double> tm_first_step(const FkParams& params, double h, TmOptions options = {});

/// Samples at t_0 .. t_M.
std::vector<SolutionSample> tm_solve(const FkParams& params, const TmGrid& grid, TmOptions options = {});

/// Dense time-marching solution with linear interpolation between grid points.
class TmReference {
 public:
  TmReference(const FkParams& params, double T, int M, TmOptions options = {});

  const TmGrid& grid() const { return grid_; }
  const std::vector<SolutionSample>& samples() const { return samples_; }

  /// Throws std::out_of_range for t outside [0, T].
  SolutionSample value_at(double t) const;

 private:
  TmGrid grid_;
  std::vector<SolutionSample> samples_;
};

}  // namespace fkcim
