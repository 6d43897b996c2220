#include "gao/model.hpp"

#include <cmath>
#include <sstream>

namespace gao {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateArc: return "DegenerateArc";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::NonPositiveStrike: return "NonPositiveStrike";
    case ErrorCode::SingularL: return "SingularL";
    case ErrorCode::SingularGamma: return "SingularGamma";
    case ErrorCode::BranchError: return "BranchError";
    case ErrorCode::DegenerateHorizon: return "DegenerateHorizon";
    case ErrorCode::VanishingPrice: return "VanishingPrice";
    case ErrorCode::VanishingVega: return "VanishingVega";
    case ErrorCode::SingularIntegral: return "SingularIntegral";
    case ErrorCode::PoleInInterval: return "PoleInInterval";
    case ErrorCode::SingularDenominator: return "SingularDenominator";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparseableField: return "UnparseableField";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::PDFactorizationFailure: return "PDFactorizationFailure";
    case ErrorCode::UnsupportedContract: return "UnsupportedContract";
    case ErrorCode::InvalidCorrelation: return "InvalidCorrelation";
  }
  return "Unknown";
}

std::string_view to_string(StrikeStyle style) noexcept {
  return style == StrikeStyle::Floating ? "floating" : "fixed";
}

std::string_view to_string(OptionKind kind) noexcept {
  return kind == OptionKind::Call ? "call" : "put";
}

ModelParams ModelParams::sp500_illustration() {
  ModelParams p;
  p.r = 0.0264;
  p.k = 2.0;
  p.alpha_prime = 0.20;
  p.z0 = 0.1834;
  p.epsilon = 0.001;
  return p;
}

double correlation_determinant(double a, double b, double c) noexcept {
  return 1.0 + 2.0 * a * b * c - a * a - b * b - c * c;
}

std::vector<Violation> validate_params(const ModelParams& p) {
  std::vector<Violation> out;
  auto flag = [&](ErrorCode code, const std::string& msg) {
    out.push_back({code, msg});
  };
  auto finite = [](double v) { return std::isfinite(v); };

  for (double v : {p.r, p.k, p.alpha_prime, p.z0, p.epsilon, p.nu, p.alpha,
                   p.beta, p.rho_xy, p.rho_xz, p.rho_yz}) {
    if (!finite(v)) {
      flag(ErrorCode::InvalidArgument, "all model parameters must be finite");
      return out;
    }
  }
  if (p.r < 0.0) flag(ErrorCode::InvalidArgument, "r must be >= 0");
  if (p.k <= 0.0) flag(ErrorCode::InvalidArgument, "k must be > 0");
  if (p.epsilon <= 0.0) flag(ErrorCode::InvalidArgument, "epsilon must be > 0");
  if (p.nu < 0.0) flag(ErrorCode::InvalidArgument, "nu must be >= 0");
  if (p.beta < 0.0) flag(ErrorCode::InvalidArgument, "beta must be >= 0");
  if (p.z0 == p.alpha_prime) {
    flag(ErrorCode::DegenerateArc, "z0 equals alpha_prime, arc coefficient P vanishes");
  }

  bool rho_ok = true;
  for (auto [name, rho] : {std::pair{"rho_xy", p.rho_xy}, std::pair{"rho_xz", p.rho_xz},
                           std::pair{"rho_yz", p.rho_yz}}) {
    if (!(std::abs(rho) < 1.0)) {
      flag(ErrorCode::InvalidCorrelation, std::string(name) + " must satisfy |rho| < 1");
      rho_ok = false;
    }
  }
  if (rho_ok) {
    double det = correlation_determinant(p.rho_xy, p.rho_xz, p.rho_yz);
    if (!(det > 0.0)) {
      std::ostringstream os;
      os << "correlation matrix not positive definite (determinant " << det << ")";
      flag(ErrorCode::InvalidCorrelation, os.str());
    }
  }
  return out;
}

void require_valid(const ModelParams& p) {
  auto v = validate_params(p);
  if (!v.empty()) fail(v.front().code, v.front().message);
}

VolArc arc_from_ou(double k, double alpha_prime, double z0, double sigma_min) {
  require(k > 0.0, ErrorCode::InvalidArgument, "k must be > 0");
  require(z0 != alpha_prime, ErrorCode::DegenerateArc,
          "z0 equals alpha_prime, arc coefficient P vanishes");
  require(sigma_min > 0.0, ErrorCode::InvalidArgument, "sigma_min must be > 0");
  const double gap = z0 - alpha_prime;
  return VolArc{gap * k * k / 2.0, -gap * k, z0, sigma_min};
}

double effective_vol(const VolArc& arc, double t) {
  require(t >= 0.0, ErrorCode::InvalidArgument, "effective_vol needs t >= 0");
  const double v = (arc.p_coef * t + arc.q_coef) * t + arc.r_coef;
  return std::max(arc.sigma_min, v);
}

StatePoint state_transform(double x, double g, double t) {
  require(x > 0.0 && g > 0.0, ErrorCode::NonPositivePrice,
          "spot and average must be > 0");
  require(t >= 0.0 && std::isfinite(t), ErrorCode::InvalidArgument, "t must be >= 0");
  const double u = (t == 0.0 || g == x) ? 0.0 : t * std::log(g / x);
  return {t, std::log(x), u};
}

MarketState::MarketState(double t, double spot, double avg)
    : spot_(spot), avg_(avg), point_(state_transform(spot, avg, t)) {
  require(std::isfinite(spot) && std::isfinite(avg), ErrorCode::NonPositivePrice,
          "spot and average must be finite");
}

double l_factor(double k, double t) {
  const double a = 1.0 - k * t;
  require(std::abs(a) > kSingularityTol, ErrorCode::SingularL, "kt within tolerance of 1");
  return (a + k * k * t * t / 2.0) / a;
}

double one_plus_l(double k, double t) {
  const double a = 1.0 - k * t;
  require(std::abs(a) > kSingularityTol, ErrorCode::SingularL, "kt within tolerance of 1");
  const double b = 2.0 - k * t;
  return b * b / (2.0 * a);
}

void OptionSpec::validate() const {
  require(maturity > 0.0 && std::isfinite(maturity), ErrorCode::InvalidArgument,
          "maturity T must be > 0");
  if (style == StrikeStyle::Fixed) {
    require(strike.has_value(), ErrorCode::InvalidArgument,
            "fixed-strike contract needs a strike K");
    require(*strike > 0.0 && std::isfinite(*strike), ErrorCode::NonPositiveStrike,
            "strike K must be > 0");
  } else {
    require(!strike.has_value(), ErrorCode::InvalidArgument,
            "floating-strike contract takes no strike K");
  }
}

double OptionSpec::strike_or_throw() const {
  require(strike.has_value(), ErrorCode::InvalidArgument, "strike K is required");
  require(*strike > 0.0, ErrorCode::NonPositiveStrike, "strike K must be > 0");
  return *strike;
}

}  // namespace gao
