#include "gao_cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gao/calibration.hpp"

namespace gao::cli {
namespace {

using nlohmann::json;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("gao_cli_test_" + name);
  std::ofstream(path) << body;
  return path;
}

const std::vector<std::string> kPriceArgs{
    "price", "--style", "floating", "--kind", "call", "--spot", "2013.99", "--avg", "2013.99",
    "--t", "0", "--T", "0.5", "--k", "2", "--r", "0.0264", "--z0", "0.1834",
    "--alpha-prime", "0.20", "--v-eps", "0"};

TEST(CliPrice, ZeroGroupParameterReducesToC0) {
  const auto r = run_cli(kPriceArgs);
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["outputs"]["price_hat"], j["outputs"]["c0"]);
  EXPECT_EQ(j["command"], "price");
  EXPECT_TRUE(j["inputs_digest"].get<std::string>().starts_with("fnv1a64:"));
}

TEST(CliPrice, RerunReproducesOutputs) {
  const auto first = json::parse(run_cli(kPriceArgs).out);
  const auto again = json::parse(run_cli(first["args"].get<std::vector<std::string>>()).out);
  EXPECT_EQ(first["outputs"], again["outputs"]);
  EXPECT_EQ(first["inputs_digest"], again["inputs_digest"]);
}

TEST(CliPrice, FixedWithoutStrikeNamesK) {
  const auto r = run_cli({"price", "--style", "fixed", "--kind", "put", "--spot", "100", "--T", "0.5"});
  EXPECT_EQ(r.code, kValidation);
  EXPECT_NE(r.err.find("strike K"), std::string::npos) << r.err;
}

TEST(CliPrice, GammaOff) {
  auto args = kPriceArgs;
  args[8] = "2100";   // --avg
  args[10] = "0.1";   // --t
  args.back() = "-0.016";
  args.push_back("--gamma-off");
  const auto r = run_cli(args);
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto o = json::parse(r.out)["outputs"];
  EXPECT_EQ(o["gamma"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(o["price_hat"].get<double>(),
                   o["b0"].get<double>() + o["c1_scaled"].get<double>());
}

TEST(CliPrice, ValidationFailureExitsTwo) {
  const auto r = run_cli({"price", "--spot", "-5", "--T", "0.5"});
  EXPECT_EQ(r.code, kValidation);
  EXPECT_NE(r.err.find("NonPositivePrice"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"price", "--spot", "100"}).code, kValidation);
}

TEST(CliCalibrate, RecoversGroupParameterAndWritesScatter) {
  const auto model = ModelParams::sp500_illustration();
  const auto arc = arc_from_model(model);
  const std::vector<SmileCell> grid{{0.0, 0.5, {0.97, 0.98, 0.99, 1.0, 1.01, 1.02, 1.03}}};
  std::ostringstream csv;
  csv.precision(17);
  csv << "t,T,spot,avg,strike,style,implied_vol\n";
  const auto rows = quotes_from_smile(arc, model, -0.01596, QuoteStyle::FixedPut, grid);
  ASSERT_GE(rows.size(), 3u);
  for (const auto& q : rows) {
    csv << q.t << ',' << q.T << ',' << q.spot << ',' << q.avg << ',' << *q.strike
        << ",fixed_put," << q.implied_vol << '\n';
  }
  csv << "0,0.5,100,100,,floating_call,-0.2\n";
  const auto quotes = temp_file("quotes.csv", csv.str());
  const auto scatter = std::filesystem::temp_directory_path() / "gao_cli_test_scatter.csv";
  const auto r = run_cli({"calibrate", "--quotes", quotes.string(), "--style", "fixed_put",
                          "--scatter-out", scatter.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto o = json::parse(r.out)["outputs"];
  EXPECT_NEAR(o["v_eps_by_cell"][0]["v_eps"].get<double>(), -0.01596, 1e-9);
  EXPECT_NEAR(o["a_eps"].get<double>(), 0.6367, 1e-4);
  ASSERT_EQ(o["rejects"].size(), 1u);
  EXPECT_EQ(o["rejects"][0]["line"], rows.size() + 2);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  std::ifstream sc(scatter);
  std::string header;
  std::getline(sc, header);
  EXPECT_EQ(header, "x,y");
}

TEST(CliCalibrate, EmptyQuotesExitThree) {
  const auto quotes = temp_file("empty.csv", "");
  EXPECT_EQ(run_cli({"calibrate", "--quotes", quotes.string()}).code, kData);
}

TEST(CliCalibrate, DegenerateDesignExitThree) {
  const auto quotes = temp_file("single.csv",
                                "t,T,spot,avg,strike,style,implied_vol\n"
                                "0,0.5,100,100,100,fixed_put,0.19\n"
                                "0,0.5,100,100,100,fixed_put,0.18\n");
  EXPECT_EQ(run_cli({"calibrate", "--quotes", quotes.string()}).code, kData);
}

TEST(CliCalibrate, IngestFailureExitTwo) {
  const auto quotes = temp_file("noheader.csv", "t,T,spot\n0,0.5,100\n");
  EXPECT_EQ(run_cli({"calibrate", "--quotes", quotes.string()}).code, kValidation);
  EXPECT_EQ(run_cli({"calibrate", "--quotes", "/nonexistent/q.csv"}).code, kValidation);
}

TEST(CliSmile, FlatWithoutCorrection) {
  const auto r = run_cli({"smile", "--grid", "0.9:1.1:5", "--T", "0.5", "--v-eps", "0"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "maturity,moneyness,implied_vol");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0.18340000000000001");
  }
  EXPECT_EQ(rows, 5);
}

TEST(CliSmile, SingularMaturityRowsAreFlagged) {
  const auto r = run_cli({"smile", "--grid", "1:1:1", "--T", "0.5", "--T", "1.0", "--json",
                          "--v-eps", "-0.016"});
  ASSERT_EQ(r.code, kOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_TRUE(json::parse(line)["valid"].get<bool>());
  std::getline(in, line);
  const auto bad = json::parse(line);
  EXPECT_FALSE(bad["valid"].get<bool>());
  EXPECT_TRUE(bad["implied_vol"].is_null());
  EXPECT_NE(r.err.find("skipped"), std::string::npos);
}

TEST(CliValidate, SmallRunIsDeterministicAndWarns) {
  const std::vector<std::string> args{"validate", "--paths", "10", "--steps", "10", "--seed", "5"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  EXPECT_NE(a.err.find("underpowered"), std::string::npos);
  EXPECT_EQ(json::parse(a.out)["outputs"], json::parse(b.out)["outputs"]);
}

TEST(CliValidate, ConstantVolPasses) {
  const auto r = run_cli({"validate", "--paths", "100000", "--steps", "50"});
  ASSERT_EQ(r.code, kOk) << r.out;
  for (const auto& c : json::parse(r.out)["outputs"]["comparisons"]) {
    EXPECT_TRUE(c["pass"].get<bool>()) << c.dump();
  }
}

TEST(CliValidate, FailingComparisonExitsFour) {
  // The clamp caps the simulated vol at 2 while the closed form uses 3.
  const auto r = run_cli({"validate", "--paths", "20000", "--steps", "20", "--mode", "full",
                          "--z0", "3.0", "--alpha-prime", "2.9"});
  EXPECT_EQ(r.code, kAcceptance) << r.out;
}

}  // namespace
}  // namespace gao::cli
