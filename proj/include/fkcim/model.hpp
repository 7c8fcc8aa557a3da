#pragma once

#include "fkcim/special_functions.hpp"

namespace fkcim {

/// Two-state Feynman-Kac model. Transition matrix [[p, 1-p], [1-b, b]],
/// fractional orders alpha_j, rates Binv_j (= B_{alpha_j}^{-1}), functional
/// weights U_j, Laplace variable rho of the functional and initial data G_j0.
struct FkParams {
  double p = 0.0;
  double b = 0.0;
  double alpha1 = 0.5;
  double alpha2 = 0.5;
  double Binv1 = 1.0;
  double Binv2 = 1.0;
  double U1 = 0.0;
  double U2 = 0.0;
  double rho = 0.0;
  double G10 = 0.0;
  double G20 = 0.0;

  bool operator==(const FkParams&) const = default;
};

/// Throws InvalidParameter when an invariant is violated.
void validate(const FkParams& params);

struct DerivedCoeffs {
  double m1 = 0.0;  // (1-p)/(1-p-b)
  double m2 = 0.0;  // (1-b)/(1-p-b)
  double C1 = 0.0;  // m1 * Binv1
  double C2 = 0.0;  // m2 * Binv2
};

DerivedCoeffs derive_coeffs(const FkParams& params);

/// Which expression bounds |Im z| of the singular box.
enum class D2Formula {
  remark,    // (|C_j| / cos(alpha_j pi/2))^(1/alpha_j) - Im(rho U_j)
  appendix,  // (sqrt(5) |C_j|)^(1/alpha_j) + |Im(rho U_j)|
  max,       // larger of the two
};

/// H(z) is analytic whenever Re z > d1 or |Im z| > d2.
struct AnalyticityBounds {
  double d1 = 0.0;
  double d2 = 0.0;
};

inline constexpr double kMinD2 = 1e-12;

AnalyticityBounds analyticity_bounds(const FkParams& params, D2Formula formula = D2Formula::max);

/// Radius beyond which the denominator of H cannot vanish: the largest of
/// 2|rho U_j|, (4|C_j|)^(1/alpha_j) and (32|C1 C2|)^(1/(alpha1+alpha2)).
double pole_free_radius(const FkParams& params);

struct LaplaceValue {
  Complex G1hat;
  Complex G2hat;
};

struct Transfer {
  Complex H;
  Complex H_alpha1;
  Complex H_alpha2;
};

/// Laplace-space solution of the two-state system. Immutable once built;
/// every member is a pure function of z.
class Model {
 public:
  explicit Model(const FkParams& params);

  const FkParams& params() const { return params_; }
  const DerivedCoeffs& coeffs() const { return coeffs_; }

  /// [(z+rho U1)^a1 - C1][(z+rho U2)^a2 - C2] - C1 C2, without the pole check.
  Complex denominator(Complex z) const;

  /// Throws PoleError when |denominator| < 1e-300.
  Transfer transfer(Complex z) const;
  Complex H(Complex z) const { return transfer(z).H; }
  Complex H_alpha1(Complex z) const { return transfer(z).H_alpha1; }
  Complex H_alpha2(Complex z) const { return transfer(z).H_alpha2; }

  /// Decoupled closed form for (G1hat, G2hat).
  LaplaceValue g_hat(Complex z) const;

  /// d/drho of g_hat at the model's rho (closed form).
  LaplaceValue dg_hat_drho(Complex z) const;

 private:
  FkParams params_;
  DerivedCoeffs coeffs_;
  double rhoU1_;
  double rhoU2_;
};

/// Direct elimination of the coupled 2x2 Laplace-space system. Exists as an
/// independent check of Model::g_hat. Does not require rho >= 0, so it can
/// also serve central differences in rho around zero.
LaplaceValue g_hat_coupled_oracle(Complex z, const FkParams& params);

}  // namespace fkcim
