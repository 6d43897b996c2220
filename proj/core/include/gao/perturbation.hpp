#pragma once

// First-order asymptotic price C0 + sqrt(eps) C1 around the l-modified
// Black-Scholes price of the geometric Asian option.

#include "gao/closed_form.hpp"
#include "gao/model.hpp"

namespace gao {

/// Relative floor (times spot) below which B0 is treated as dead for M.
inline constexpr double kPriceFloorRel = 1e-12;

/// gamma(t) = [((2-kT)/(2-kt))^{2/k} exp((T-t)((2-kt)(2-kT)+2)/((2-kt)(2-kT)))]^m,
/// evaluated in log space. Equals 1 at t = T for every m.
double modification_factor(double k, double t, double T, double m);

/// M = theta / B0; throws VanishingPrice when |b0| <= kPriceFloorRel * spot.
double m_exponent(double b0, double theta_b0, double spot);

/// Weighted time integrals of 1 / (1 + l(tau)) over [t, T]:
///   i0..i3 = int tau^n / (1 + l) dtau,  i4 = int (T - tau)^2 / (1 + l) dtau,
///   i5 = int (T - tau)^3 / (1 + l) dtau.
struct IIntegrals {
  double i0 = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double i4 = 0.0;
  double i5 = 0.0;
};

/// Closed forms. Requires 0 <= t <= T and kT < 2 (outside a kSingularityTol
/// band); otherwise SingularIntegral. Windows short relative to the distance
/// to the kt = 2 pole are summed from a convergent series instead, because
/// the log-based expressions cancel catastrophically there.
IIntegrals i_integrals_closed(double k, double t, double T);

/// Adaptive Gauss-Kronrod evaluation of the same six integrals; independent
/// of the closed forms. PoleInInterval when kt = 2 falls inside [t, T].
IIntegrals i_integrals_quadrature(double k, double t, double T, double abs_tol = 1e-12);

/// Group parameter of the correction. Only the product sqrt(eps) * V is
/// identifiable from smiles, so that is what is stored.
struct CorrectionParams {
  double v_eps = 0.0;

  static CorrectionParams from_v_eps(double v_eps);
  static CorrectionParams from_pair(double v, double epsilon);
};

/// V (I1 du1 - 2 I2 du2 + I3 du3) with the u-derivatives of C0.
double c1_floating(const CorrectionParams& v, const IIntegrals& ii, const GreekSet& g);

/// V (I4 du2 - I5 du3) with the u-derivatives of C0.
double c1_fixed(const CorrectionParams& v, const IIntegrals& ii, const GreekSet& g);

/// Correction operator applied with V = 1.
double correction_unit(StrikeStyle style, const IIntegrals& ii, const GreekSet& g);

struct PricingOptions {
  bool apply_gamma = true;
  ThetaMethod theta_method = ThetaMethod::FiniteDifference;
};

struct PriceBreakdown {
  double sigma = 0.0;       ///< effective volatility used
  double b0 = 0.0;          ///< Black-Scholes GAO price
  double theta_b0 = 0.0;    ///< dB0/dt
  double m_exponent = 0.0;  ///< theta / B0 (0 when gamma is disabled)
  double gamma = 1.0;
  double c0 = 0.0;          ///< gamma * B0
  double c1_unit = 0.0;     ///< C1 evaluated with V = 1
  double correction = 0.0;  ///< v_eps * c1_unit
  double price_hat = 0.0;   ///< c0 + correction
  GreekSet greeks;          ///< Greeks of C0
  IIntegrals integrals;
};

/// Full assembly B0 -> theta -> M -> gamma -> C0 -> I -> Greeks -> C1.
/// Errors carry the name of the failing stage in their message.
PriceBreakdown first_order_price(const OptionSpec& spec, const MarketState& state,
                                 const VolArc& arc, const ModelParams& model,
                                 const CorrectionParams& correction,
                                 const PricingOptions& options = {});

}  // namespace gao
