#pragma once

// Black-Scholes prices and sensitivities of continuously sampled geometric
// Asian options, written in the (t, s, u) coordinates s = ln x and
// u = t ln(G / x). These are the B0 building blocks of the asymptotic price.

#include "gao/model.hpp"

namespace gao {

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;

struct DTermsFloating {
  double d1 = 0.0;
  double d2 = 0.0;
  double q_drift = 0.0;
};

struct DTermsFixed {
  double d1_hat = 0.0;
  double d2_hat = 0.0;
  double q_drift = 0.0;
};

/// Throws DegenerateHorizon when T - t < kHorizonTol.
DTermsFloating d_terms_floating(double sigma, double t, double T, double u, double r);

/// Fixed-strike quantiles. q_drift is the discounted forward exponent,
/// e^{-r(T-t)} E[G_T] = e^{s + u/T - q_drift}.
DTermsFixed d_terms_fixed(double sigma, double t, double T, double s, double u,
                          double K, double r);

/// e^{s + u/T - q_drift}: discounted forward of the geometric average for
/// the fixed-strike contract.
double fixed_forward(const StatePoint& pt, double sigma, double T, double r);

double bs_floating_call(const StatePoint& pt, double sigma, double T, double r);
double bs_fixed_call(const StatePoint& pt, double sigma, double T, double K, double r);
double bs_fixed_put(const StatePoint& pt, double sigma, double T, double K, double r);

/// Dispatch on contract style and kind. Floating-strike puts are not priced
/// by the closed form and raise UnsupportedContract.
double b0_price(const OptionSpec& spec, const StatePoint& pt, double sigma, double r);

/// u-derivatives and vega of C0 = gamma * B0 (gamma held fixed) plus the
/// plain theta dB0/dt.
struct GreekSet {
  double du1 = 0.0;
  double du2 = 0.0;
  double du3 = 0.0;
  double vega = 0.0;
  double theta_b0 = 0.0;
};

GreekSet greeks_floating_call(const StatePoint& pt, double sigma, double T, double r,
                              double gamma_factor = 1.0);
GreekSet greeks_fixed_put(const StatePoint& pt, double sigma, double T, double K, double r,
                          double gamma_factor = 1.0);
GreekSet greeks_fixed_call(const StatePoint& pt, double sigma, double T, double K, double r,
                           double gamma_factor = 1.0);

GreekSet greeks(const OptionSpec& spec, const StatePoint& pt, double sigma, double r,
                double gamma_factor = 1.0);

enum class ThetaMethod { FiniteDifference, Analytic };

/// dB0/dt at fixed (s, u, sigma). The default is a fourth-order
/// Richardson-extrapolated central difference; Analytic uses the closed form.
double b0_theta(const OptionSpec& spec, const StatePoint& pt, double sigma, double r,
                ThetaMethod method = ThetaMethod::FiniteDifference);

/// Plain second-order central difference with step h.
double b0_theta_central(const OptionSpec& spec, const StatePoint& pt, double sigma,
                        double r, double h);

/// Terminal payoff expressed in (s, u) at t = T.
double terminal_payoff(const OptionSpec& spec, double s, double u);

}  // namespace gao
