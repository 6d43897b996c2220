#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gao/errors.hpp"

namespace gao {

/// Absolute guard on |1 - kt| and |2 - kt| in the time-factor formulas.
inline constexpr double kSingularityTol = 1e-8;
/// Default positive floor applied to the effective volatility.
inline constexpr double kDefaultSigmaMin = 1e-4;
/// Remaining life (years) below which a contract is treated as expired.
inline constexpr double kHorizonTol = 1e-9;

/// Market and model constants of the two-factor volatility model.
///
/// The stock follows dX = rX dt + f(Y, Z) X dW^x with a fast factor
/// dY = (alpha - Y)/epsilon dt + nu*sqrt(2/epsilon) dW^y and a slow OU factor
/// dZ = k(alpha' - Z) dt + beta dW^z. Only r, k, alpha', z0 enter the
/// closed-form price; the remaining fields drive the Monte-Carlo simulator.
struct ModelParams {
  double r = 0.0;            ///< risk-free rate (1/year)
  double k = 1.0;            ///< slow-factor mean-reversion speed (1/year)
  double alpha_prime = 0.2;  ///< slow-factor long-run level
  double z0 = 0.1;           ///< slow-factor initial level
  double epsilon = 1e-3;     ///< fast time scale (years)
  double nu = 0.0;           ///< fast-factor volatility scale
  double alpha = 0.0;        ///< fast-factor long-run mean
  double beta = 0.0;         ///< slow-factor vol-of-vol
  double rho_xy = 0.0;
  double rho_xz = 0.0;
  double rho_yz = 0.0;

  /// S&P 500 illustration set: k = 2, r = 0.0264, eps = 0.001,
  /// z0 = 0.1834, alpha' = 0.20; fast-factor fields left at zero.
  static ModelParams sp500_illustration();
};

struct Violation {
  ErrorCode code;
  std::string message;
};

/// Every violated invariant of `p`; empty when the set is admissible.
std::vector<Violation> validate_params(const ModelParams& p);

/// Throws the first violation of validate_params, if any.
void require_valid(const ModelParams& p);

/// 1 + 2 r_xy r_xz r_yz - r_xy^2 - r_xz^2 - r_yz^2, the determinant of the
/// 3x3 Brownian correlation matrix.
double correlation_determinant(double rho_xy, double rho_xz, double rho_yz) noexcept;

/// Quadratic approximation P t^2 + Q t + R of the slow volatility factor.
struct VolArc {
  double p_coef = 0.0;
  double q_coef = 0.0;
  double r_coef = 0.0;
  double sigma_min = kDefaultSigmaMin;
};

/// Second-order expansion of the OU mean path of Z around t = 0.
VolArc arc_from_ou(double k, double alpha_prime, double z0,
                   double sigma_min = kDefaultSigmaMin);

inline VolArc arc_from_model(const ModelParams& p,
                             double sigma_min = kDefaultSigmaMin) {
  return arc_from_ou(p.k, p.alpha_prime, p.z0, sigma_min);
}

/// Arc value at t, clipped from below at arc.sigma_min.
double effective_vol(const VolArc& arc, double t);

/// Log-price / log-moneyness coordinates: s = ln x, u = t ln(g / x).
struct StatePoint {
  double t = 0.0;
  double s = 0.0;
  double u = 0.0;
};

StatePoint state_transform(double x, double g, double t);

/// Valuation time, spot and running geometric average.
///
/// At t = 0 the average of an empty window is the spot itself, so the
/// constructor accepts g = x there and u vanishes regardless of g.
class MarketState {
 public:
  MarketState(double t, double spot, double avg);

  /// Fresh contract: t = 0 and g = x.
  static MarketState at_inception(double spot) { return {0.0, spot, spot}; }

  double t() const noexcept { return point_.t; }
  double spot() const noexcept { return spot_; }
  double avg() const noexcept { return avg_; }
  double s() const noexcept { return point_.s; }
  double u() const noexcept { return point_.u; }
  const StatePoint& point() const noexcept { return point_; }

 private:
  double spot_;
  double avg_;
  StatePoint point_;
};

/// l(t) = (1 - kt + k^2 t^2 / 2) / (1 - kt).
double l_factor(double k, double t);

/// 1 + l(t) = (2 - kt)^2 / (2 (1 - kt)).
double one_plus_l(double k, double t);

enum class StrikeStyle { Floating, Fixed };
enum class OptionKind { Call, Put };

std::string_view to_string(StrikeStyle style) noexcept;
std::string_view to_string(OptionKind kind) noexcept;

struct OptionSpec {
  StrikeStyle style = StrikeStyle::Floating;
  OptionKind kind = OptionKind::Call;
  double maturity = 1.0;
  std::optional<double> strike;  ///< present iff style == Fixed

  static OptionSpec floating(OptionKind kind, double maturity) {
    return {StrikeStyle::Floating, kind, maturity, std::nullopt};
  }
  static OptionSpec fixed(OptionKind kind, double maturity, double strike) {
    return {StrikeStyle::Fixed, kind, maturity, strike};
  }

  void validate() const;
  double strike_or_throw() const;
};

}  // namespace gao
