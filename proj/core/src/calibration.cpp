#include "gao/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

namespace gao {
namespace {

constexpr double kDenominatorTol = 1e-12;

MarketState state_for(const QuoteRow& q) {
  return q.t == 0.0 ? MarketState::at_inception(q.spot) : MarketState(q.t, q.spot, q.avg);
}

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

const std::vector<std::string>& quote_columns() {
  static const std::vector<std::string> cols{"t",     "T",    "spot",       "avg",
                                             "strike", "style", "implied_vol"};
  return cols;
}

}  // namespace

std::string_view to_string(QuoteStyle style) noexcept {
  return style == QuoteStyle::FloatingCall ? "floating_call" : "fixed_put";
}

std::optional<QuoteStyle> parse_quote_style(std::string_view text) noexcept {
  if (text == "floating_call") return QuoteStyle::FloatingCall;
  if (text == "fixed_put") return QuoteStyle::FixedPut;
  return std::nullopt;
}

OptionSpec option_spec_for(QuoteStyle style, double maturity, std::optional<double> strike) {
  if (style == QuoteStyle::FloatingCall) return OptionSpec::floating(OptionKind::Call, maturity);
  require(strike.has_value(), ErrorCode::InvalidArgument, "fixed_put quote needs a strike");
  return OptionSpec::fixed(OptionKind::Put, maturity, *strike);
}

void QuoteRow::validate() const {
  require(t >= 0.0 && t < T, ErrorCode::InvalidArgument, "quote needs 0 <= t < T");
  require(spot > 0.0 && avg > 0.0, ErrorCode::NonPositivePrice, "spot and avg must be > 0");
  require(implied_vol > 0.0, ErrorCode::InvalidArgument, "implied_vol must be > 0");
  if (style == QuoteStyle::FixedPut) {
    require(strike.has_value(), ErrorCode::InvalidArgument, "fixed_put quote needs a strike");
    require(*strike > 0.0, ErrorCode::NonPositiveStrike, "strike must be > 0");
  } else {
    require(!strike.has_value(), ErrorCode::InvalidArgument,
            "floating_call quote must leave strike empty");
  }
}

double calibration_denominator(double k, double t, double T) {
  require(k > 0.0, ErrorCode::InvalidArgument, "k must be > 0");
  require(t < T, ErrorCode::InvalidArgument, "denominator needs t < T");
  const double a = 2.0 - k * t;
  const double b = 2.0 - k * T;
  require(std::abs(a) > kSingularityTol && std::abs(b) > kSingularityTol,
          ErrorCode::SingularDenominator, "kt or kT within tolerance of 2");
  require(b / a > 0.0, ErrorCode::SingularDenominator, "(2 - kT)/(2 - kt) must be positive");
  const double tau = T - t;
  const double d = (std::log(b / a) / k + tau / (a * b)) / tau;
  require(std::abs(d) > kDenominatorTol, ErrorCode::SingularDenominator,
          "calibration denominator vanishes");
  return d;
}

RegressionPoint regression_row(const QuoteRow& q, const VolArc& arc, const ModelParams& model) {
  q.validate();
  const double denom = calibration_denominator(model.k, q.t, q.T);
  const auto spec = option_spec_for(q.style, q.T, q.strike);
  const auto bd = first_order_price(spec, state_for(q), arc, model, CorrectionParams{0.0});
  RegressionPoint p;
  p.y = (q.implied_vol - bd.sigma) * bd.greeks.vega;
  p.x = model.r * bd.sigma * bd.c1_unit / denom;
  return p;
}

RegressionFit ols_fit(std::span<const RegressionPoint> rows) {
  const std::size_t n = rows.size();
  require(n >= 2, ErrorCode::DegenerateDesign, "regression needs at least two rows");

  double mx = 0.0, my = 0.0, xmax = 0.0;
  for (const auto& p : rows) {
    mx += p.x;
    my += p.y;
    xmax = std::max(xmax, std::abs(p.x));
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : rows) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double spread_floor = static_cast<double>(n) * std::pow(1e-10 * xmax, 2);
  require(sxx > spread_floor && sxx > 0.0, ErrorCode::DegenerateDesign,
          "regressor x has no spread");

  RegressionFit fit;
  fit.n = n;
  fit.a_eps = sxy / sxx;
  fit.d_eps = my - fit.a_eps * mx;

  double ssr = 0.0;
  for (const auto& p : rows) {
    const double e = p.y - (fit.a_eps * p.x + fit.d_eps);
    ssr += e * e;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  if (n > 2) {
    const double s2 = ssr / static_cast<double>(n - 2);
    fit.slope_se = std::sqrt(s2 / sxx);
    fit.intercept_se = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
  }
  return fit;
}

GroupParameter v_from_fit(const RegressionFit& fit, double epsilon, double r, double sigma,
                          double k, double t, double T, QuoteStyle /*style*/) {
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be > 0");
  require(sigma > 0.0, ErrorCode::InvalidArgument, "sigma must be > 0");
  // Floating calls and fixed puts share the same recovery formula.
  const double denom = 2.0 * calibration_denominator(k, t, T);
  const double root_eps = std::sqrt(epsilon);
  GroupParameter g;
  g.a = fit.a_eps / root_eps;
  g.v = g.a * (2.0 * r * sigma) / denom;
  g.v_eps = root_eps * g.v;
  return g;
}

QuoteIngest ingest_quotes(std::istream& in) {
  QuoteIngest out;
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) {
    out.warnings.emplace_back("EmptyInput: quotes file has no header or rows");
    return out;
  }

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (std::find(quote_columns().begin(), quote_columns().end(), header[i]) ==
        quote_columns().end()) {
      fail(ErrorCode::UnparseableField,
           "line " + std::to_string(line_no) + ": unknown column '" + header[i] + "'");
    }
    index[header[i]] = i;
  }
  for (const auto& col : quote_columns()) {
    if (!index.count(col)) fail(ErrorCode::MissingColumn, "missing column '" + col + "'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    auto reject = [&](const std::string& why) { out.rejects.push_back({line_no, why}); };
    if (cells.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(cells.size()));
      continue;
    }

    QuoteRow q;
    q.line = line_no;
    std::string bad;
    auto number = [&](const char* col, double& dst) {
      auto v = parse_double(cells[index[col]]);
      if (!v) {
        if (bad.empty()) {
          bad = std::string("UnparseableField: column '") + col + "' value '" +
                cells[index[col]] + "'";
        }
        return;
      }
      dst = *v;
    };
    number("t", q.t);
    number("T", q.T);
    number("spot", q.spot);
    number("avg", q.avg);
    number("implied_vol", q.implied_vol);
    const auto& strike_text = cells[index["strike"]];
    if (!strike_text.empty()) {
      auto k = parse_double(strike_text);
      if (!k && bad.empty()) bad = "UnparseableField: column 'strike' value '" + strike_text + "'";
      q.strike = k;
    }
    auto style = parse_quote_style(cells[index["style"]]);
    if (!style && bad.empty()) {
      bad = "UnparseableField: column 'style' value '" + cells[index["style"]] + "'";
    }
    if (!bad.empty()) {
      reject(bad);
      continue;
    }
    q.style = *style;
    try {
      q.validate();
    } catch (const Error& e) {
      reject(e.what());
      continue;
    }
    out.rows.push_back(q);
  }
  if (out.rows.empty() && out.rejects.empty()) {
    out.warnings.emplace_back("EmptyInput: quotes file has a header but no rows");
  }
  return out;
}

QuoteIngest ingest_quotes(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::InvalidArgument,
          "cannot open quotes file '" + path.string() + "'");
  return ingest_quotes(in);
}

CalibrationResult calibrate(std::span<const QuoteRow> rows, QuoteStyle style,
                            const VolArc& arc, const ModelParams& model) {
  require_valid(model);
  CalibrationResult out;
  out.style = style;

  std::map<std::pair<double, double>, CellEstimate> cells;
  for (const auto& q : rows) {
    if (q.style != style) continue;
    try {
      out.points.push_back(regression_row(q, arc, model));
    } catch (const Error& e) {
      out.rejects.push_back({q.line, e.what()});
      continue;
    }
    auto& cell = cells[{q.t, q.T}];
    cell.t = q.t;
    cell.T = q.T;
    cell.count += 1;
  }
  require(!out.points.empty(), ErrorCode::EmptyInput, "no usable quotes of the requested style");
  out.fit = ols_fit(out.points);

  bool first = true;
  for (auto& [key, cell] : cells) {
    cell.sigma = effective_vol(arc, cell.t);
    cell.estimate =
        v_from_fit(out.fit, model.epsilon, model.r, cell.sigma, model.k, cell.t, cell.T, style);
    if (first) {
      out.v_eps_min = out.v_eps_max = cell.estimate.v_eps;
      first = false;
    } else {
      out.v_eps_min = std::min(out.v_eps_min, cell.estimate.v_eps);
      out.v_eps_max = std::max(out.v_eps_max, cell.estimate.v_eps);
    }
    out.cells.push_back(cell);
  }
  return out;
}

std::vector<SmilePoint> smile_curve(const VolArc& arc, const ModelParams& model, double v_eps,
                                    QuoteStyle style, std::span<const SmileCell> grid,
                                    double spot) {
  require(spot > 0.0, ErrorCode::NonPositivePrice, "spot must be > 0");
  std::vector<SmilePoint> out;
  for (const auto& cell : grid) {
    for (double m : cell.moneyness) {
      SmilePoint pt{cell.t, cell.T, m, 0.0, true, {}};
      try {
        require(m > 0.0, ErrorCode::InvalidArgument, "moneyness must be > 0");
        const bool floating = style == QuoteStyle::FloatingCall;
        const double avg = floating ? m * spot : spot;
        const std::optional<double> strike =
            floating ? std::nullopt : std::optional<double>(m * spot);
        const auto spec = option_spec_for(style, cell.T, strike);
        const MarketState state =
            cell.t == 0.0 ? MarketState::at_inception(spot) : MarketState(cell.t, spot, avg);
        const auto bd = first_order_price(spec, state, arc, model, CorrectionParams{0.0});
        if (!(std::abs(bd.greeks.vega) >= kVegaFloorRel * spot)) {
          fail(ErrorCode::VanishingVega, "vega below floor");
        }
        pt.implied_vol = bd.sigma + v_eps * bd.c1_unit / bd.greeks.vega;
      } catch (const Error& e) {
        pt.valid = false;
        pt.implied_vol = std::nan("");
        pt.flag = e.what();
      }
      out.push_back(std::move(pt));
    }
  }
  return out;
}

std::vector<QuoteRow> quotes_from_smile(const VolArc& arc, const ModelParams& model,
                                        double v_eps, QuoteStyle style,
                                        std::span<const SmileCell> grid, double spot) {
  std::vector<QuoteRow> out;
  for (const auto& p : smile_curve(arc, model, v_eps, style, grid, spot)) {
    if (!p.valid || !(p.implied_vol > 0.0)) continue;
    QuoteRow q;
    q.t = p.t;
    q.T = p.T;
    q.spot = spot;
    q.style = style;
    q.implied_vol = p.implied_vol;
    if (style == QuoteStyle::FloatingCall) {
      q.avg = p.t == 0.0 ? spot : p.moneyness * spot;
    } else {
      q.avg = spot;
      q.strike = p.moneyness * spot;
    }
    out.push_back(q);
  }
  return out;
}

}  // namespace gao
