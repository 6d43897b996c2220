#include "gao/perturbation.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace gao {
namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage '") + name + "': " + e.what());
  }
}

}  // namespace

double modification_factor(double k, double t, double T, double m) {
  require(k > 0.0, ErrorCode::InvalidArgument, "k must be > 0");
  require(t <= T, ErrorCode::InvalidArgument, "modification factor needs t <= T");
  require(std::isfinite(m), ErrorCode::InvalidArgument, "exponent M must be finite");
  const double a = 2.0 - k * t;
  const double b = 2.0 - k * T;
  require(std::abs(a) > kSingularityTol && std::abs(b) > kSingularityTol,
          ErrorCode::SingularGamma, "kt or kT within tolerance of 2");
  const double ratio = b / a;
  require(ratio > 0.0, ErrorCode::BranchError, "(2 - kT) / (2 - kt) must be positive");
  if (m == 0.0) return 1.0;
  const double log_base = (2.0 / k) * std::log(ratio) + (T - t) * (a * b + 2.0) / (a * b);
  return std::exp(m * log_base);
}

double m_exponent(double b0, double theta_b0, double spot) {
  require(spot > 0.0, ErrorCode::NonPositivePrice, "spot must be > 0");
  if (!(std::abs(b0) > kPriceFloorRel * spot)) {
    std::ostringstream os;
    os << "B0 = " << b0 << " is below the floor " << kPriceFloorRel * spot;
    fail(ErrorCode::VanishingPrice, os.str());
  }
  return theta_b0 / b0;
}

CorrectionParams CorrectionParams::from_v_eps(double v_eps) {
  require(std::isfinite(v_eps), ErrorCode::InvalidArgument, "v_eps must be finite");
  return {v_eps};
}

CorrectionParams CorrectionParams::from_pair(double v, double epsilon) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be > 0");
  return from_v_eps(std::sqrt(epsilon) * v);
}

double c1_floating(const CorrectionParams& v, const IIntegrals& ii, const GreekSet& g) {
  return v.v_eps * (ii.i1 * g.du1 - 2.0 * ii.i2 * g.du2 + ii.i3 * g.du3);
}

double c1_fixed(const CorrectionParams& v, const IIntegrals& ii, const GreekSet& g) {
  return v.v_eps * (ii.i4 * g.du2 - ii.i5 * g.du3);
}

double correction_unit(StrikeStyle style, const IIntegrals& ii, const GreekSet& g) {
  const CorrectionParams one{1.0};
  return style == StrikeStyle::Floating ? c1_floating(one, ii, g) : c1_fixed(one, ii, g);
}

PriceBreakdown first_order_price(const OptionSpec& spec, const MarketState& state,
                                 const VolArc& arc, const ModelParams& model,
                                 const CorrectionParams& correction,
                                 const PricingOptions& options) {
  stage("validate", [&] {
    spec.validate();
    require_valid(model);
    require(state.t() < spec.maturity, ErrorCode::InvalidArgument,
            "valuation time must satisfy t < T");
  });

  const double T = spec.maturity;
  const StatePoint& pt = state.point();
  PriceBreakdown out;
  out.sigma = stage("effective_vol", [&] { return effective_vol(arc, state.t()); });

  if (T - state.t() < kHorizonTol) {
    out.b0 = terminal_payoff(spec, pt.s, pt.u);
    out.c0 = out.b0;
    out.price_hat = out.b0;
    return out;
  }

  out.b0 = stage("b0", [&] { return b0_price(spec, pt, out.sigma, model.r); });
  out.theta_b0 = stage("theta", [&] {
    return b0_theta(spec, pt, out.sigma, model.r, options.theta_method);
  });
  if (options.apply_gamma) {
    out.m_exponent = stage("m_exponent", [&] {
      return m_exponent(out.b0, out.theta_b0, state.spot());
    });
    out.gamma = stage("gamma", [&] {
      return modification_factor(model.k, state.t(), T, out.m_exponent);
    });
  }
  out.c0 = out.gamma * out.b0;
  out.integrals = stage("integrals", [&] { return i_integrals_closed(model.k, state.t(), T); });
  out.greeks = stage("greeks", [&] { return greeks(spec, pt, out.sigma, model.r, out.gamma); });
  out.c1_unit = correction_unit(spec.style, out.integrals, out.greeks);
  out.correction = correction.v_eps * out.c1_unit;
  out.price_hat = out.c0 + out.correction;
  return out;
}

}  // namespace gao
