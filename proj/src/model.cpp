#include "fkcim/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fkcim/errors.hpp"

namespace fkcim {

namespace {

using special::complex_pow;

constexpr double kPoleThreshold = 1e-300;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidParameter(what);
}

bool finite_all(const FkParams& p) {
  for (double v : {p.p, p.b, p.alpha1, p.alpha2, p.Binv1, p.Binv2, p.U1, p.U2, p.rho, p.G10, p.G20}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

DerivedCoeffs coeffs_unchecked(const FkParams& params) {
  const double denom = 1.0 - params.p - params.b;
  DerivedCoeffs c;
  c.m1 = (1.0 - params.p) / denom;
  c.m2 = (1.0 - params.b) / denom;
  c.C1 = c.m1 * params.Binv1;
  c.C2 = c.m2 * params.Binv2;
  return c;
}

}  // namespace

void validate(const FkParams& params) {
  require(finite_all(params), "parameters must be finite");
  require(params.p >= 0.0 && params.p <= 1.0, "p must lie in [0, 1]");
  require(params.b >= 0.0 && params.b <= 1.0, "b must lie in [0, 1]");
  require(std::abs(params.p + params.b - 1.0) >= 1e-12, "p + b must differ from 1");
  require(params.alpha1 > 0.0 && params.alpha1 < 1.0, "alpha1 must lie in (0, 1)");
  require(params.alpha2 > 0.0 && params.alpha2 < 1.0, "alpha2 must lie in (0, 1)");
  require(params.Binv1 > 0.0, "Binv1 must be positive");
  require(params.Binv2 > 0.0, "Binv2 must be positive");
  require(params.U1 >= 0.0, "U1 must be non-negative");
  require(params.U2 >= 0.0, "U2 must be non-negative");
  require(params.rho >= 0.0, "rho must be non-negative");
}

DerivedCoeffs derive_coeffs(const FkParams& params) {
  validate(params);
  return coeffs_unchecked(params);
}

AnalyticityBounds analyticity_bounds(const FkParams& params, D2Formula formula) {
  const DerivedCoeffs c = derive_coeffs(params);
  const double alpha[2] = {params.alpha1, params.alpha2};
  const double C[2] = {std::abs(c.C1), std::abs(c.C2)};
  const double rhoU[2] = {params.rho * params.U1, params.rho * params.U2};

  AnalyticityBounds out;
  out.d1 = -std::numeric_limits<double>::infinity();
  out.d2 = kMinD2;
  for (int j = 0; j < 2; ++j) {
    const double cosine = std::cos(alpha[j] * std::numbers::pi / 2.0);
    out.d1 = std::max(out.d1, std::pow(2.0 * C[j] / cosine, 1.0 / alpha[j]) - rhoU[j]);
    const double remark = std::pow(C[j] / cosine, 1.0 / alpha[j]);
    const double appendix = std::pow(std::sqrt(5.0) * C[j], 1.0 / alpha[j]);
    double d2 = 0.0;
    switch (formula) {
      case D2Formula::remark: d2 = remark; break;
      case D2Formula::appendix: d2 = appendix; break;
      case D2Formula::max: d2 = std::max(remark, appendix); break;
    }
    out.d2 = std::max(out.d2, d2);
  }
  return out;
}

double pole_free_radius(const FkParams& params) {
  const DerivedCoeffs c = derive_coeffs(params);
  double r = 2.0 * std::max(std::abs(params.rho * params.U1), std::abs(params.rho * params.U2));
  r = std::max(r, std::pow(4.0 * std::abs(c.C1), 1.0 / params.alpha1));
  r = std::max(r, std::pow(4.0 * std::abs(c.C2), 1.0 / params.alpha2));
  r = std::max(r, std::pow(32.0 * std::abs(c.C1 * c.C2), 1.0 / (params.alpha1 + params.alpha2)));
  return r;
}

Model::Model(const FkParams& params)
    : params_(params),
      coeffs_(derive_coeffs(params)),
      rhoU1_(params.rho * params.U1),
      rhoU2_(params.rho * params.U2) {}

Complex Model::denominator(Complex z) const {
  const Complex P1 = complex_pow(z + rhoU1_, params_.alpha1) - coeffs_.C1;
  const Complex P2 = complex_pow(z + rhoU2_, params_.alpha2) - coeffs_.C2;
  return P1 * P2 - coeffs_.C1 * coeffs_.C2;
}

Transfer Model::transfer(Complex z) const {
  const Complex P1 = complex_pow(z + rhoU1_, params_.alpha1) - coeffs_.C1;
  const Complex P2 = complex_pow(z + rhoU2_, params_.alpha2) - coeffs_.C2;
  const Complex D = P1 * P2 - coeffs_.C1 * coeffs_.C2;
  if (!(std::abs(D) >= kPoleThreshold)) {
    throw PoleError("denominator of H(z) vanishes at z = (" + std::to_string(z.real()) + ", " +
                    std::to_string(z.imag()) + ")");
  }
  const Complex H = 1.0 / D;
  return {H, H * P2, H * P1};
}

LaplaceValue Model::g_hat(Complex z) const {
  const Complex w1 = z + rhoU1_;
  const Complex w2 = z + rhoU2_;
  const Transfer tr = transfer(z);
  const Complex s1 = complex_pow(w1, params_.alpha1 - 1.0);
  const Complex s2 = complex_pow(w2, params_.alpha2 - 1.0);
  LaplaceValue out;
  out.G1hat = s1 * (tr.H_alpha1 * params_.G10 - coeffs_.C2 * tr.H * params_.G20);
  out.G2hat = s2 * (tr.H_alpha2 * params_.G20 - coeffs_.C1 * tr.H * params_.G10);
  return out;
}

LaplaceValue Model::dg_hat_drho(Complex z) const {
  const double a1 = params_.alpha1;
  const double a2 = params_.alpha2;
  const double U1 = params_.U1;
  const double U2 = params_.U2;
  const Complex w1 = z + rhoU1_;
  const Complex w2 = z + rhoU2_;

  const Complex w1a = complex_pow(w1, a1);
  const Complex w2a = complex_pow(w2, a2);
  const Complex s1 = w1a / w1;  // w1^(a1-1)
  const Complex s2 = w2a / w2;
  const Complex P1 = w1a - coeffs_.C1;
  const Complex P2 = w2a - coeffs_.C2;
  const Complex D = P1 * P2 - coeffs_.C1 * coeffs_.C2;
  if (!(std::abs(D) >= kPoleThreshold)) {
    throw PoleError("denominator of H(z) vanishes at z = (" + std::to_string(z.real()) + ", " +
                    std::to_string(z.imag()) + ")");
  }
  const Complex H = 1.0 / D;

  const Complex dP1 = a1 * U1 * s1;
  const Complex dP2 = a2 * U2 * s2;
  const Complex dH = -H * H * (dP1 * P2 + P1 * dP2);
  const Complex ds1 = (a1 - 1.0) * U1 * s1 / w1;
  const Complex ds2 = (a2 - 1.0) * U2 * s2 / w2;

  const Complex N1 = P2 * params_.G10 - coeffs_.C2 * params_.G20;
  const Complex N2 = P1 * params_.G20 - coeffs_.C1 * params_.G10;
  const Complex dN1 = dP2 * params_.G10;
  const Complex dN2 = dP1 * params_.G20;

  LaplaceValue out;
  out.G1hat = ds1 * H * N1 + s1 * dH * N1 + s1 * H * dN1;
  out.G2hat = ds2 * H * N2 + s2 * dH * N2 + s2 * H * dN2;
  return out;
}

LaplaceValue g_hat_coupled_oracle(Complex z, const FkParams& params) {
  const DerivedCoeffs c = coeffs_unchecked(params);
  const Complex w1 = z + params.rho * params.U1;
  const Complex w2 = z + params.rho * params.U2;
  // Laplace transform of the integral form: (z + rho U_j) G_j - G_j0 equals
  // the fractional coupling terms C_j w_j^(1-a_j) G_j.
  const Complex k1 = c.C1 * complex_pow(w1, 1.0 - params.alpha1);
  const Complex k2 = c.C2 * complex_pow(w2, 1.0 - params.alpha2);
  const Complex a11 = w1 - k1;
  const Complex a12 = k2;
  const Complex a21 = k1;
  const Complex a22 = w2 - k2;
  const Complex det = a11 * a22 - a12 * a21;
  if (!(std::abs(det) >= kPoleThreshold)) throw PoleError("coupled Laplace system is singular");
  LaplaceValue out;
  out.G1hat = (params.G10 * a22 - a12 * params.G20) / det;
  out.G2hat = (a11 * params.G20 - a21 * params.G10) / det;
  return out;
}

}  // namespace fkcim
