#pragma once

// Estimation of the group parameter sqrt(eps) V from implied-volatility
// quotes, and reconstruction of the first-order smile it implies.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gao/model.hpp"
#include "gao/perturbation.hpp"

namespace gao {

/// Only contracts with strictly positive vega carry a usable smile.
enum class QuoteStyle { FloatingCall, FixedPut };

std::string_view to_string(QuoteStyle style) noexcept;
std::optional<QuoteStyle> parse_quote_style(std::string_view text) noexcept;
OptionSpec option_spec_for(QuoteStyle style, double maturity, std::optional<double> strike);

struct QuoteRow {
  double t = 0.0;
  double T = 0.0;
  double spot = 0.0;
  double avg = 0.0;
  std::optional<double> strike;
  QuoteStyle style = QuoteStyle::FloatingCall;
  double implied_vol = 0.0;
  std::size_t line = 0;  ///< 1-based source line, 0 when synthetic

  void validate() const;
};

struct RegressionPoint {
  double x = 0.0;
  double y = 0.0;
};

/// (1 / (T - t)) [ (1/k) ln((2 - kT)/(2 - kt)) + (T - t)/((2 - kT)(2 - kt)) ].
double calibration_denominator(double k, double t, double T);

/// y = (I - sigma) dC0/dsigma,  x = r sigma (correction operator on C0) / D.
RegressionPoint regression_row(const QuoteRow& q, const VolArc& arc, const ModelParams& model);

struct RegressionFit {
  double a_eps = 0.0;      ///< slope, sqrt(eps) a
  double d_eps = 0.0;      ///< intercept, sqrt(eps) d
  double r_squared = 0.0;
  std::size_t n = 0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
};

/// Ordinary least squares y = a x + d. DegenerateDesign when x has no spread.
RegressionFit ols_fit(std::span<const RegressionPoint> rows);

struct GroupParameter {
  double a = 0.0;      ///< a_eps / sqrt(eps)
  double v = 0.0;      ///< V
  double v_eps = 0.0;  ///< sqrt(eps) V
};

/// V = a (2 r sigma) / ((2/(T-t)) [ (1/k) ln((2-kT)/(2-kt)) + (T-t)/((2-kT)(2-kt)) ]).
GroupParameter v_from_fit(const RegressionFit& fit, double epsilon, double r, double sigma,
                          double k, double t, double T, QuoteStyle style);

struct Reject {
  std::size_t line = 0;
  std::string reason;
};

struct QuoteIngest {
  std::vector<QuoteRow> rows;
  std::vector<Reject> rejects;
  std::vector<std::string> warnings;
};

/// CSV with header t,T,spot,avg,strike,style,implied_vol. Header problems
/// throw MissingColumn / UnparseableField; bad rows land in `rejects`.
QuoteIngest ingest_quotes(std::istream& in);
QuoteIngest ingest_quotes(const std::filesystem::path& path);

struct CellEstimate {
  double t = 0.0;
  double T = 0.0;
  double sigma = 0.0;
  std::size_t count = 0;
  GroupParameter estimate;
};

struct CalibrationResult {
  QuoteStyle style = QuoteStyle::FloatingCall;
  RegressionFit fit;
  std::vector<RegressionPoint> points;
  std::vector<Reject> rejects;  ///< rows that failed regression_row
  std::vector<CellEstimate> cells;
  double v_eps_min = 0.0;
  double v_eps_max = 0.0;
};

/// Pooled regression over every (t, T) cell of `rows` with the given style,
/// then v_eps reported per cell. Rows of another style are ignored.
CalibrationResult calibrate(std::span<const QuoteRow> rows, QuoteStyle style,
                            const VolArc& arc, const ModelParams& model);

struct SmileCell {
  double t = 0.0;
  double T = 0.0;
  std::vector<double> moneyness;
};

struct SmilePoint {
  double t = 0.0;
  double T = 0.0;
  double moneyness = 0.0;
  double implied_vol = 0.0;
  bool valid = true;
  std::string flag;
};

/// Relative vega floor (times spot) for smile inversion.
inline constexpr double kVegaFloorRel = 1e-10;

/// First-order implied vol sigma + v_eps (correction operator on C0) / vega.
/// Moneyness is G/x for floating calls (spot fixed, average varied) and K/x
/// for fixed puts (average equal to spot). Points that cannot be evaluated
/// are returned with valid = false and a reason in `flag`.
std::vector<SmilePoint> smile_curve(const VolArc& arc, const ModelParams& model, double v_eps,
                                    QuoteStyle style, std::span<const SmileCell> grid,
                                    double spot = 100.0);

/// Quotes whose implied vols lie exactly on smile_curve. Invalid points and
/// points whose first-order vol is not positive are dropped.
std::vector<QuoteRow> quotes_from_smile(const VolArc& arc, const ModelParams& model,
                                        double v_eps, QuoteStyle style,
                                        std::span<const SmileCell> grid, double spot = 100.0);

}  // namespace gao
