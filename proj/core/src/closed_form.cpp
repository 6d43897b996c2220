#include "gao/closed_form.hpp"

#include <cmath>
#include <numbers>

namespace gao {
namespace {

void check_point(double sigma, double t, double T) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidArgument,
          "volatility must be > 0");
  require(T > 0.0, ErrorCode::InvalidArgument, "maturity must be > 0");
  require(t <= T, ErrorCode::InvalidArgument, "valuation time must not exceed maturity");
  require(T - t >= kHorizonTol, ErrorCode::DegenerateHorizon,
          "remaining life below horizon tolerance");
}

bool expired(double t, double T) { return T - t < kHorizonTol; }

double window_var_floating(double t, double T) { return (T * T * T - t * t * t) / 3.0; }
double window_var_fixed(double t, double T) {
  const double tau = T - t;
  return tau * tau * tau / 3.0;
}

// d q_drift / d sigma, identical for the floating and fixed drifts.
double dq_dsigma(double sigma, double t, double T) {
  const double tau = T - t;
  return sigma * tau * tau * (T + 2.0 * t) / (6.0 * T * T);
}

struct FloatingParts {
  DTermsFloating d;
  double fwd;     // e^{s + u/T - Q}
  double sq_a;    // sqrt((T^3 - t^3) / 3)
};

FloatingParts floating_parts(const StatePoint& pt, double sigma, double T, double r) {
  FloatingParts out;
  out.d = d_terms_floating(sigma, pt.t, T, pt.u, r);
  out.fwd = std::exp(pt.s + pt.u / T - out.d.q_drift);
  out.sq_a = std::sqrt(window_var_floating(pt.t, T));
  return out;
}

struct FixedParts {
  DTermsFixed d;
  double fwd;
  double sq_b;    // sqrt((T - t)^3 / 3)
  double disc_k;  // K e^{-r(T-t)}
};

FixedParts fixed_parts(const StatePoint& pt, double sigma, double T, double K, double r) {
  FixedParts out;
  out.d = d_terms_fixed(sigma, pt.t, T, pt.s, pt.u, K, r);
  out.fwd = std::exp(pt.s + pt.u / T - out.d.q_drift);
  out.sq_b = std::sqrt(window_var_fixed(pt.t, T));
  out.disc_k = K * std::exp(-r * (T - pt.t));
  return out;
}

double floating_theta_analytic(const StatePoint& pt, double sigma, double T, double r) {
  const auto p = floating_parts(pt, sigma, T, r);
  const double t = pt.t;
  const double dv_dt = -(sigma / T) * t * t / (2.0 * p.sq_a);
  const double dq_dt = -(r + 0.5 * sigma * sigma) * t / T + sigma * sigma * t * t / (2.0 * T * T);
  return p.fwd * normal_pdf(p.d.d2) * dv_dt + dq_dt * p.fwd * normal_cdf(p.d.d2);
}

double fixed_call_theta_analytic(const StatePoint& pt, double sigma, double T, double K,
                                 double r) {
  const auto p = fixed_parts(pt, sigma, T, K, r);
  const double tau = T - pt.t;
  const double dv_dt = -(sigma / T) * tau * tau / (2.0 * p.sq_b);
  const double dq_dt = -r + (r - 0.5 * sigma * sigma) * tau / T +
                       sigma * sigma * tau * tau / (2.0 * T * T);
  return -dq_dt * p.fwd * normal_cdf(p.d.d1_hat) - r * p.disc_k * normal_cdf(p.d.d2_hat) +
         p.fwd * normal_pdf(p.d.d1_hat) * dv_dt;
}

double fixed_put_theta_analytic(const StatePoint& pt, double sigma, double T, double K,
                                double r) {
  const auto p = fixed_parts(pt, sigma, T, K, r);
  const double tau = T - pt.t;
  const double dq_dt = -r + (r - 0.5 * sigma * sigma) * tau / T +
                       sigma * sigma * tau * tau / (2.0 * T * T);
  return fixed_call_theta_analytic(pt, sigma, T, K, r) + dq_dt * p.fwd + r * p.disc_k;
}

}  // namespace

double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

DTermsFloating d_terms_floating(double sigma, double t, double T, double u, double r) {
  check_point(sigma, t, T);
  const double sq_a = std::sqrt(window_var_floating(t, T));
  const double drift = r + 0.5 * sigma * sigma;
  DTermsFloating d;
  d.d1 = (-u + drift * (T * T - t * t) / 2.0) / (sigma * sq_a);
  d.d2 = d.d1 - (sigma / T) * sq_a;
  d.q_drift = drift * (T * T - t * t) / (2.0 * T) -
              sigma * sigma * (T * T * T - t * t * t) / (6.0 * T * T);
  return d;
}

DTermsFixed d_terms_fixed(double sigma, double t, double T, double s, double u, double K,
                          double r) {
  check_point(sigma, t, T);
  require(K > 0.0, ErrorCode::NonPositiveStrike, "strike K must be > 0");
  const double tau = T - t;
  const double width = (sigma / T) * std::sqrt(window_var_fixed(t, T));
  DTermsFixed d;
  d.d2_hat = (u / T + s - std::log(K) + (r - 0.5 * sigma * sigma) * tau * tau / (2.0 * T)) /
             width;
  d.d1_hat = d.d2_hat + width;
  d.q_drift = r * tau - (r - 0.5 * sigma * sigma) * tau * tau / (2.0 * T) -
              sigma * sigma * tau * tau * tau / (6.0 * T * T);
  return d;
}

double fixed_forward(const StatePoint& pt, double sigma, double T, double r) {
  if (expired(pt.t, T)) return std::exp(pt.s + pt.u / T);
  const auto d = d_terms_fixed(sigma, pt.t, T, pt.s, pt.u, 1.0, r);
  return std::exp(pt.s + pt.u / T - d.q_drift);
}

double terminal_payoff(const OptionSpec& spec, double s, double u) {
  const double T = spec.maturity;
  if (spec.style == StrikeStyle::Floating) {
    const double x = std::exp(s);
    const double g = std::exp(s + u / T);
    return spec.kind == OptionKind::Call ? std::max(x - g, 0.0) : std::max(g - x, 0.0);
  }
  const double K = spec.strike_or_throw();
  const double g = std::exp(s + u / T);
  return spec.kind == OptionKind::Call ? std::max(g - K, 0.0) : std::max(K - g, 0.0);
}

double bs_floating_call(const StatePoint& pt, double sigma, double T, double r) {
  if (expired(pt.t, T)) {
    return std::exp(pt.s) * std::max(1.0 - std::exp(pt.u / T), 0.0);
  }
  const auto p = floating_parts(pt, sigma, T, r);
  const double price = std::exp(pt.s) * normal_cdf(p.d.d1) - p.fwd * normal_cdf(p.d.d2);
  return std::max(price, 0.0);
}

double bs_fixed_call(const StatePoint& pt, double sigma, double T, double K, double r) {
  require(K > 0.0, ErrorCode::NonPositiveStrike, "strike K must be > 0");
  if (expired(pt.t, T)) return std::max(std::exp(pt.s + pt.u / T) - K, 0.0);
  const auto p = fixed_parts(pt, sigma, T, K, r);
  const double price = p.fwd * normal_cdf(p.d.d1_hat) - p.disc_k * normal_cdf(p.d.d2_hat);
  return std::max(price, 0.0);
}

double bs_fixed_put(const StatePoint& pt, double sigma, double T, double K, double r) {
  require(K > 0.0, ErrorCode::NonPositiveStrike, "strike K must be > 0");
  if (expired(pt.t, T)) return std::max(K - std::exp(pt.s + pt.u / T), 0.0);
  const auto p = fixed_parts(pt, sigma, T, K, r);
  const double price = p.disc_k * normal_cdf(-p.d.d2_hat) - p.fwd * normal_cdf(-p.d.d1_hat);
  return std::max(price, 0.0);
}

double b0_price(const OptionSpec& spec, const StatePoint& pt, double sigma, double r) {
  spec.validate();
  const double T = spec.maturity;
  if (spec.style == StrikeStyle::Floating) {
    require(spec.kind == OptionKind::Call, ErrorCode::UnsupportedContract,
            "floating-strike puts have no closed form here");
    return bs_floating_call(pt, sigma, T, r);
  }
  const double K = *spec.strike;
  return spec.kind == OptionKind::Call ? bs_fixed_call(pt, sigma, T, K, r)
                                       : bs_fixed_put(pt, sigma, T, K, r);
}

GreekSet greeks_floating_call(const StatePoint& pt, double sigma, double T, double r,
                              double gamma_factor) {
  const auto p = floating_parts(pt, sigma, T, r);
  const double a = p.sq_a * p.sq_a;
  const double pdf = normal_pdf(p.d.d2);
  const double b_du1 = -p.fwd / T * normal_cdf(p.d.d2);
  const double b_du2 = (b_du1 + p.fwd * pdf / (sigma * p.sq_a)) / T;
  const double b_du3 =
      (b_du2 + p.fwd * (pdf / (sigma * T * p.sq_a) + p.d.d2 * pdf / (sigma * sigma * a))) / T;
  const double b_vega = p.fwd * (p.sq_a / T * pdf + dq_dsigma(sigma, pt.t, T) * normal_cdf(p.d.d2));

  GreekSet g;
  g.du1 = gamma_factor * b_du1;
  g.du2 = gamma_factor * b_du2;
  g.du3 = gamma_factor * b_du3;
  g.vega = gamma_factor * b_vega;
  g.theta_b0 = floating_theta_analytic(pt, sigma, T, r);
  return g;
}

GreekSet greeks_fixed_put(const StatePoint& pt, double sigma, double T, double K, double r,
                          double gamma_factor) {
  const auto p = fixed_parts(pt, sigma, T, K, r);
  const double b = p.sq_b * p.sq_b;
  const double d1 = p.d.d1_hat;
  const double pdf = normal_pdf(d1);
  const double b_du1 = -p.fwd / T * normal_cdf(-d1);
  const double b_du2 = (b_du1 + p.fwd * pdf / (sigma * p.sq_b)) / T;
  const double b_du3 =
      (b_du2 + p.fwd * (pdf / (sigma * T * p.sq_b) - d1 * pdf / (sigma * sigma * b))) / T;
  const double b_vega = p.fwd * (p.sq_b / T * pdf + dq_dsigma(sigma, pt.t, T) * normal_cdf(-d1));

  GreekSet g;
  g.du1 = gamma_factor * b_du1;
  g.du2 = gamma_factor * b_du2;
  g.du3 = gamma_factor * b_du3;
  g.vega = gamma_factor * b_vega;
  g.theta_b0 = fixed_put_theta_analytic(pt, sigma, T, K, r);
  return g;
}

GreekSet greeks_fixed_call(const StatePoint& pt, double sigma, double T, double K, double r,
                           double gamma_factor) {
  // Call = put + F - K e^{-r(T-t)}; the forward F has d^n F / du^n = F / T^n.
  GreekSet g = greeks_fixed_put(pt, sigma, T, K, r, gamma_factor);
  const auto p = fixed_parts(pt, sigma, T, K, r);
  const double f = gamma_factor * p.fwd;
  g.du1 += f / T;
  g.du2 += f / (T * T);
  g.du3 += f / (T * T * T);
  g.vega -= f * dq_dsigma(sigma, pt.t, T);
  g.theta_b0 = fixed_call_theta_analytic(pt, sigma, T, K, r);
  return g;
}

GreekSet greeks(const OptionSpec& spec, const StatePoint& pt, double sigma, double r,
                double gamma_factor) {
  spec.validate();
  const double T = spec.maturity;
  if (spec.style == StrikeStyle::Floating) {
    require(spec.kind == OptionKind::Call, ErrorCode::UnsupportedContract,
            "floating-strike put Greeks are not provided");
    return greeks_floating_call(pt, sigma, T, r, gamma_factor);
  }
  const double K = *spec.strike;
  return spec.kind == OptionKind::Call ? greeks_fixed_call(pt, sigma, T, K, r, gamma_factor)
                                       : greeks_fixed_put(pt, sigma, T, K, r, gamma_factor);
}

double b0_theta_central(const OptionSpec& spec, const StatePoint& pt, double sigma, double r,
                        double h) {
  require(h > 0.0, ErrorCode::InvalidArgument, "finite-difference step must be > 0");
  require(pt.t + h < spec.maturity - kHorizonTol, ErrorCode::DegenerateHorizon,
          "theta stencil reaches the expiry");
  // The price formulas are analytic in t, so the stencil may step below t = 0.
  StatePoint up = pt, dn = pt;
  up.t += h;
  dn.t -= h;
  return (b0_price(spec, up, sigma, r) - b0_price(spec, dn, sigma, r)) / (2.0 * h);
}

double b0_theta(const OptionSpec& spec, const StatePoint& pt, double sigma, double r,
                ThetaMethod method) {
  spec.validate();
  require(spec.maturity - pt.t >= kHorizonTol, ErrorCode::DegenerateHorizon,
          "theta requested at expiry");
  if (method == ThetaMethod::Analytic) return greeks(spec, pt, sigma, r).theta_b0;

  const double h = 1e-3 * (spec.maturity - pt.t);
  const double coarse = b0_theta_central(spec, pt, sigma, r, 2.0 * h);
  const double fine = b0_theta_central(spec, pt, sigma, r, h);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace gao
