#include "gao_cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "gao/calibration.hpp"
#include "gao/closed_form.hpp"
#include "gao/model.hpp"
#include "gao/monte_carlo.hpp"
#include "gao/perturbation.hpp"

namespace gao::cli {
namespace {

using nlohmann::json;

// Thrown for data problems (exit 3) as opposed to validation problems.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  double k = 2.0;
  double r = 0.0264;
  double z0 = 0.1834;
  double alpha_prime = 0.20;
  double epsilon = 0.001;
  double sigma_min = kDefaultSigmaMin;
  double v_eps = 0.0;

  ModelParams params() const {
    ModelParams p;
    p.k = k;
    p.r = r;
    p.z0 = z0;
    p.alpha_prime = alpha_prime;
    p.epsilon = epsilon;
    return p;
  }

  json to_json() const {
    return {{"k", k},         {"r", r},
            {"z0", z0},       {"alpha_prime", alpha_prime},
            {"epsilon", epsilon}, {"sigma_min", sigma_min},
            {"v_eps", v_eps}};
  }
};

void add_model_flags(CLI::App* app, ModelFlags& m) {
  app->add_option("--k", m.k, "slow-factor mean-reversion speed (1/year)")->capture_default_str();
  app->add_option("--r", m.r, "risk-free rate (decimal per year)")->capture_default_str();
  app->add_option("--z0", m.z0, "slow-factor volatility level now (decimal)")->capture_default_str();
  app->add_option("--alpha-prime", m.alpha_prime, "slow-factor long-run volatility (decimal)")
      ->capture_default_str();
  app->add_option("--epsilon", m.epsilon, "fast time scale (years)")->capture_default_str();
  app->add_option("--sigma-min", m.sigma_min, "floor on the effective volatility (decimal)")
      ->capture_default_str();
  app->add_option("--v-eps", m.v_eps, "group parameter sqrt(eps) V of the correction")
      ->capture_default_str();
}

std::string digest(const json& inputs) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : inputs.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

json report(const std::string& command, const std::vector<std::string>& args,
            const json& inputs, json outputs, const std::vector<std::string>& warnings,
            std::chrono::steady_clock::time_point start) {
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  return {{"command", command},
          {"args", args},
          {"inputs", inputs},
          {"inputs_digest", digest(inputs)},
          {"outputs", std::move(outputs)},
          {"warnings", warnings},
          {"wall_time_s", wall.count()}};
}

json greeks_json(const GreekSet& g) {
  return {{"du1", g.du1}, {"du2", g.du2}, {"du3", g.du3}, {"vega", g.vega},
          {"theta_b0", g.theta_b0}};
}

json integrals_json(const IIntegrals& ii) {
  return {{"i0", ii.i0}, {"i1", ii.i1}, {"i2", ii.i2},
          {"i3", ii.i3}, {"i4", ii.i4}, {"i5", ii.i5}};
}

StrikeStyle parse_strike_style(const std::string& s) {
  if (s == "floating") return StrikeStyle::Floating;
  if (s == "fixed") return StrikeStyle::Fixed;
  fail(ErrorCode::InvalidArgument, "--style must be floating or fixed, got '" + s + "'");
}

QuoteStyle parse_smile_style(const std::string& s) {
  if (s == "floating" || s == "floating_call") return QuoteStyle::FloatingCall;
  if (s == "fixed" || s == "fixed_put") return QuoteStyle::FixedPut;
  fail(ErrorCode::InvalidArgument,
       "--style must be floating_call or fixed_put, got '" + s + "'");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  require(parts.size() == 3, ErrorCode::InvalidArgument, "--grid must look like lo:hi:n");
  double lo = 0.0, hi = 0.0;
  long n = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    require(used == parts[0].size(), ErrorCode::InvalidArgument, "bad grid lower bound");
    hi = std::stod(parts[1], &used);
    require(used == parts[1].size(), ErrorCode::InvalidArgument, "bad grid upper bound");
    n = std::stol(parts[2], &used);
    require(used == parts[2].size(), ErrorCode::InvalidArgument, "bad grid count");
  } catch (const std::logic_error&) {
    fail(ErrorCode::InvalidArgument, "--grid must look like lo:hi:n, got '" + text + "'");
  }
  require(n >= 1, ErrorCode::InvalidArgument, "grid count n must be >= 1");
  require(lo > 0.0 && hi >= lo, ErrorCode::InvalidArgument, "grid needs 0 < lo <= hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---------------------------------------------------------------- price

struct PriceFlags {
  std::string style = "floating";
  std::string kind = "call";
  double spot = 0.0;
  std::optional<double> avg;
  std::optional<double> strike;
  double t = 0.0;
  double T = 0.0;
  bool gamma_off = false;
  std::string theta = "fd";
  ModelFlags model;
};

int cmd_price(const PriceFlags& f, const std::vector<std::string>& args, std::ostream& out,
              std::chrono::steady_clock::time_point start) {
  const StrikeStyle style = parse_strike_style(f.style);
  const OptionKind kind = f.kind == "put" ? OptionKind::Put : OptionKind::Call;
  OptionSpec spec;
  if (style == StrikeStyle::Fixed) {
    require(f.strike.has_value(), ErrorCode::InvalidArgument,
            "fixed-strike contract needs a strike K (--strike)");
    spec = OptionSpec::fixed(kind, f.T, *f.strike);
  } else {
    require(!f.strike.has_value(), ErrorCode::InvalidArgument,
            "floating-strike contract takes no strike K");
    spec = OptionSpec::floating(kind, f.T);
  }
  const double avg = f.avg.value_or(f.spot);
  const ModelParams model = f.model.params();
  const VolArc arc = arc_from_model(model, f.model.sigma_min);
  const MarketState state(f.t, f.spot, avg);
  PricingOptions opts;
  opts.apply_gamma = !f.gamma_off;
  opts.theta_method = f.theta == "analytic" ? ThetaMethod::Analytic : ThetaMethod::FiniteDifference;
  const auto bd =
      first_order_price(spec, state, arc, model, CorrectionParams::from_v_eps(f.model.v_eps), opts);

  json inputs = {{"style", f.style}, {"kind", f.kind},   {"spot", f.spot},
                 {"avg", avg},       {"t", f.t},         {"T", f.T},
                 {"gamma_off", f.gamma_off}, {"theta", f.theta}, {"model", f.model.to_json()}};
  inputs["strike"] = f.strike ? json(*f.strike) : json(nullptr);
  json outputs = {{"sigma", bd.sigma},
                  {"b0", bd.b0},
                  {"theta_b0", bd.theta_b0},
                  {"m_exponent", bd.m_exponent},
                  {"gamma", bd.gamma},
                  {"c0", bd.c0},
                  {"c1_unit", bd.c1_unit},
                  {"c1_scaled", bd.correction},
                  {"price_hat", bd.price_hat},
                  {"greeks", greeks_json(bd.greeks)},
                  {"integrals", integrals_json(bd.integrals)}};
  out << report("price", args, inputs, std::move(outputs), {}, start).dump(2) << '\n';
  return kOk;
}

// ------------------------------------------------------------ calibrate

struct CalibrateFlags {
  std::string quotes;
  std::optional<std::string> style;
  std::optional<std::string> scatter_out;
  ModelFlags model;
};

int cmd_calibrate(const CalibrateFlags& f, const std::vector<std::string>& args,
                  std::ostream& out, std::ostream& err,
                  std::chrono::steady_clock::time_point start) {
  const ModelParams model = f.model.params();
  require_valid(model);
  const VolArc arc = arc_from_model(model, f.model.sigma_min);
  const QuoteIngest ingest = ingest_quotes(std::filesystem::path(f.quotes));
  std::vector<std::string> warnings = ingest.warnings;

  std::optional<QuoteStyle> style;
  if (f.style) style = parse_smile_style(*f.style);
  if (!style) {
    bool has_fl = false, has_fx = false;
    for (const auto& q : ingest.rows) {
      (q.style == QuoteStyle::FloatingCall ? has_fl : has_fx) = true;
    }
    require(!(has_fl && has_fx), ErrorCode::InvalidArgument,
            "quotes mix floating_call and fixed_put rows; choose one with --style");
    style = has_fx ? QuoteStyle::FixedPut : QuoteStyle::FloatingCall;
  }
  if (ingest.rows.empty()) throw DataError("EmptyInput: no usable quotes in " + f.quotes);

  CalibrationResult res;
  try {
    res = calibrate(ingest.rows, *style, arc, model);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateDesign || e.code() == ErrorCode::EmptyInput) {
      throw DataError(e.what());
    }
    throw;
  }

  json rejects = json::array();
  for (const auto& r : ingest.rejects) rejects.push_back({{"line", r.line}, {"reason", r.reason}});
  for (const auto& r : res.rejects) rejects.push_back({{"line", r.line}, {"reason", r.reason}});
  if (!rejects.empty()) {
    warnings.push_back(std::to_string(rejects.size()) + " quote row(s) rejected");
  }
  json cells = json::array();
  for (const auto& c : res.cells) {
    cells.push_back({{"t", c.t},
                     {"T", c.T},
                     {"sigma", c.sigma},
                     {"count", c.count},
                     {"a", c.estimate.a},
                     {"V", c.estimate.v},
                     {"v_eps", c.estimate.v_eps}});
  }

  if (f.scatter_out) {
    std::ofstream sc(*f.scatter_out);
    require(static_cast<bool>(sc), ErrorCode::InvalidArgument,
            "cannot write scatter file '" + *f.scatter_out + "'");
    sc << std::setprecision(17) << "x,y\n";
    for (const auto& p : res.points) sc << p.x << ',' << p.y << '\n';
  }

  json inputs = {{"quotes", f.quotes},
                 {"style", std::string(to_string(*style))},
                 {"model", f.model.to_json()}};
  inputs["scatter_out"] = f.scatter_out ? json(*f.scatter_out) : json(nullptr);
  json outputs = {{"a_eps", res.fit.a_eps},
                  {"d_eps", res.fit.d_eps},
                  {"r_squared", res.fit.r_squared},
                  {"n", res.fit.n},
                  {"slope_se", res.fit.slope_se},
                  {"intercept_se", res.fit.intercept_se},
                  {"rejects", rejects},
                  {"v_eps_by_cell", cells},
                  {"v_eps_range", {res.v_eps_min, res.v_eps_max}}};
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  out << report("calibrate", args, inputs, std::move(outputs), warnings, start).dump(2) << '\n';
  return kOk;
}

// ------------------------------------------------------------- validate

struct ValidateFlags {
  std::uint64_t paths = 200000;
  std::uint32_t steps = 250;
  std::uint64_t seed = 20240601;
  std::string mode = "constant";
  double spot = 100.0;
  double t = 0.0;
  double T = 0.5;
  std::optional<double> strike;
  std::optional<double> sigma;
  bool no_antithetic = false;
  unsigned threads = 0;
  double nu = 0.1;
  double rho_xy = -0.5;
  double beta = 0.0;
  ModelFlags model;
};

constexpr std::uint64_t kUnderpoweredPaths = 10000;

int cmd_validate(const ValidateFlags& f, const std::vector<std::string>& args,
                 std::ostream& out, std::ostream& err,
                 std::chrono::steady_clock::time_point start) {
  require(f.mode == "constant" || f.mode == "full", ErrorCode::InvalidArgument,
          "--mode must be constant or full");
  ModelParams model = f.model.params();
  model.nu = f.nu;
  model.rho_xy = f.rho_xy;
  model.beta = f.beta;
  require_valid(model);
  const VolArc arc = arc_from_model(model, f.model.sigma_min);
  const MarketState state = MarketState::at_inception(f.spot);
  const double strike = f.strike.value_or(f.spot);
  require(f.t == 0.0, ErrorCode::InvalidArgument, "validate runs fresh contracts only (t = 0)");

  McConfig cfg;
  cfg.n_paths = f.paths;
  cfg.n_steps = f.steps;
  cfg.seed = f.seed;
  cfg.antithetic = !f.no_antithetic;
  cfg.n_threads = f.threads;
  if (cfg.antithetic && cfg.n_paths % 2 == 1) cfg.n_paths += 1;

  std::vector<std::string> warnings;
  if (f.paths < kUnderpoweredPaths) {
    warnings.push_back("underpowered: " + std::to_string(f.paths) +
                       " paths give wide standard errors; comparisons are weak");
  }

  const double sigma = f.sigma.value_or(effective_vol(arc, 0.0));
  struct Case {
    std::string name;
    OptionSpec spec;
  };
  std::vector<Case> cases;
  cases.push_back({"floating_call_atm", OptionSpec::floating(OptionKind::Call, f.T)});
  if (f.mode == "constant") cases.push_back({"fixed_call", OptionSpec::fixed(OptionKind::Call, f.T, strike)});
  cases.push_back({"fixed_put", OptionSpec::fixed(OptionKind::Put, f.T, strike)});

  VolSpec vol = ConstantVol{sigma};
  if (f.mode == "full") vol = FullModel{};

  json comparisons = json::array();
  bool all_pass = true;
  for (const auto& c : cases) {
    double closed = 0.0;
    std::string reference;
    if (f.mode == "constant") {
      closed = b0_price(c.spec, state.point(), sigma, model.r);
      reference = "b0";
    } else {
      closed = first_order_price(c.spec, state, arc, model,
                                 CorrectionParams::from_v_eps(f.model.v_eps))
                   .price_hat;
      reference = "price_hat";
    }
    const McEstimate mc = price_mc(c.spec, model, vol, state, cfg);
    const double diff = mc.price - closed;
    const double z = mc.std_error > 0.0 ? diff / mc.std_error
                                        : (diff == 0.0 ? 0.0 : std::copysign(INFINITY, diff));
    const bool pass = std::abs(z) < 3.0;
    all_pass = all_pass && pass;
    comparisons.push_back({{"case", c.name},
                           {"reference", reference},
                           {"closed", closed},
                           {"mc", mc.price},
                           {"se", mc.std_error},
                           {"z", num_or_null(z)},
                           {"pass", pass}});
  }

  json inputs = {{"paths", cfg.n_paths}, {"steps", f.steps},   {"seed", f.seed},
                 {"mode", f.mode},       {"spot", f.spot},     {"t", f.t},
                 {"T", f.T},             {"strike", strike},   {"sigma", sigma},
                 {"antithetic", cfg.antithetic}, {"nu", f.nu}, {"rho_xy", f.rho_xy},
                 {"beta", f.beta},       {"model", f.model.to_json()}};
  json outputs = {{"comparisons", comparisons}, {"all_pass", all_pass}};
  for (const auto& w : warnings) err << "warning: " << w << '\n';
  out << report("validate", args, inputs, std::move(outputs), warnings, start).dump(2) << '\n';
  return all_pass ? kOk : kAcceptance;
}

// ---------------------------------------------------------------- smile

struct SmileFlags {
  std::string grid;
  double t = 0.0;
  std::vector<double> maturities;
  std::string style = "fixed_put";
  double spot = 100.0;
  bool json_lines = false;
  ModelFlags model;
};

int cmd_smile(const SmileFlags& f, std::ostream& out, std::ostream& err) {
  const QuoteStyle style = parse_smile_style(f.style);
  const std::vector<double> moneyness = parse_grid(f.grid);
  const ModelParams model = f.model.params();
  require_valid(model);
  const VolArc arc = arc_from_model(model, f.model.sigma_min);

  std::vector<SmileCell> cells;
  for (double T : f.maturities) cells.push_back({f.t, T, moneyness});
  const auto points = smile_curve(arc, model, f.model.v_eps, style, cells, f.spot);

  if (!f.json_lines) out << "maturity,moneyness,implied_vol\n";
  out << std::setprecision(17);
  for (const auto& p : points) {
    if (!p.valid) {
      err << "warning: T=" << p.T << " moneyness=" << p.moneyness << " skipped: " << p.flag
          << '\n';
    } else if (!(p.implied_vol > 0.0)) {
      err << "warning: T=" << p.T << " moneyness=" << p.moneyness
          << " first-order vol is not positive; the correction dominates here\n";
    }
    if (f.json_lines) {
      json row = {{"t", p.t},
                  {"maturity", p.T},
                  {"moneyness", p.moneyness},
                  {"implied_vol", num_or_null(p.implied_vol)},
                  {"valid", p.valid}};
      if (!p.valid) row["flag"] = p.flag;
      out << row.dump() << '\n';
    } else {
      out << p.T << ',' << p.moneyness << ',';
      if (p.valid) {
        out << p.implied_vol;
      } else {
        out << "nan";
      }
      out << '\n';
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Geometric Asian option pricer under two-factor stochastic volatility.\n"
               "Times are in years, rates and volatilities are decimals (0.1834, not 18.34%)."};
  app.name("gao");
  app.require_subcommand(1);

  PriceFlags pf;
  auto* price = app.add_subcommand("price", "first-order price, gamma factor and Greeks as JSON");
  price->add_option("--style", pf.style, "floating or fixed")
      ->check(CLI::IsMember({"floating", "fixed"}))
      ->capture_default_str();
  price->add_option("--kind", pf.kind, "call or put")
      ->check(CLI::IsMember({"call", "put"}))
      ->capture_default_str();
  price->add_option("--spot", pf.spot, "spot price x (currency)")->required();
  price->add_option("--avg", pf.avg, "running geometric average g (currency); default spot");
  price->add_option("--strike", pf.strike, "strike K (currency), fixed style only");
  price->add_option("--t", pf.t, "valuation time (years)")->capture_default_str();
  price->add_option("--T", pf.T, "maturity (years)")->required();
  price->add_flag("--gamma-off", pf.gamma_off, "use gamma = 1 instead of the modification factor");
  price->add_option("--theta", pf.theta, "theta for M: fd or analytic")
      ->check(CLI::IsMember({"fd", "analytic"}))
      ->capture_default_str();
  add_model_flags(price, pf.model);

  CalibrateFlags cf;
  auto* calib = app.add_subcommand("calibrate", "regress quotes for sqrt(eps) V");
  calib->add_option("--quotes", cf.quotes, "CSV t,T,spot,avg,strike,style,implied_vol")
      ->required();
  calib->add_option("--style", cf.style, "floating_call or fixed_put (required if mixed)");
  calib->add_option("--scatter-out", cf.scatter_out, "write regression (x,y) pairs as CSV");
  add_model_flags(calib, cf.model);

  ValidateFlags vf;
  auto* valid = app.add_subcommand("validate", "compare closed forms with Monte Carlo");
  valid->add_option("--paths", vf.paths, "number of paths")->capture_default_str();
  valid->add_option("--steps", vf.steps, "time steps over [t, T]")->capture_default_str();
  valid->add_option("--seed", vf.seed, "64-bit seed")->capture_default_str();
  valid->add_option("--mode", vf.mode, "constant (vs B0) or full (vs first-order price)")
      ->check(CLI::IsMember({"constant", "full"}))
      ->capture_default_str();
  valid->add_option("--spot", vf.spot, "spot price (currency)")->capture_default_str();
  valid->add_option("--t", vf.t, "valuation time (years)")->capture_default_str();
  valid->add_option("--T", vf.T, "maturity (years)")->capture_default_str();
  valid->add_option("--strike", vf.strike, "fixed strike K (currency); default spot");
  valid->add_option("--sigma", vf.sigma, "constant volatility; default the arc value at t");
  valid->add_flag("--no-antithetic", vf.no_antithetic, "disable antithetic pairs");
  valid->add_option("--threads", vf.threads, "worker threads, 0 = all cores")
      ->capture_default_str();
  valid->add_option("--nu", vf.nu, "fast-factor vol scale (full mode)")->capture_default_str();
  valid->add_option("--rho-xy", vf.rho_xy, "stock/fast-factor correlation (full mode)")
      ->capture_default_str();
  valid->add_option("--beta", vf.beta, "slow-factor vol of vol (full mode)")
      ->capture_default_str();
  add_model_flags(valid, vf.model);

  SmileFlags sf;
  auto* smile = app.add_subcommand("smile", "first-order implied-vol smile as CSV");
  smile->add_option("--grid", sf.grid, "moneyness grid lo:hi:n (K/x or G/x)")->required();
  smile->add_option("--t", sf.t, "valuation time (years)")->capture_default_str();
  smile->add_option("--T", sf.maturities, "maturity (years), repeatable")->required();
  smile->add_option("--style", sf.style, "floating_call or fixed_put")->capture_default_str();
  smile->add_option("--spot", sf.spot, "spot price (currency)")->capture_default_str();
  smile->add_flag("--json", sf.json_lines, "JSON lines instead of CSV");
  add_model_flags(smile, sf.model);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (price->parsed()) return cmd_price(pf, args, out, start);
    if (calib->parsed()) return cmd_calibrate(cf, args, out, err, start);
    if (valid->parsed()) return cmd_validate(vf, args, out, err, start);
    if (smile->parsed()) return cmd_smile(sf, out, err);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

}  // namespace gao::cli
