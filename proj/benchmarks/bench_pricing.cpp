#include <benchmark/benchmark.h>

#include "gao/calibration.hpp"
#include "gao/monte_carlo.hpp"
#include "gao/perturbation.hpp"

namespace {

using namespace gao;

const ModelParams kModel = ModelParams::sp500_illustration();

void BM_ClosedFormFloatingCall(benchmark::State& state) {
  const auto pt = state_transform(100.0, 98.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(bs_floating_call(pt, 0.1834, 0.5, kModel.r));
}
BENCHMARK(BM_ClosedFormFloatingCall);

void BM_GreeksFixedPut(benchmark::State& state) {
  const auto pt = state_transform(100.0, 98.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(greeks_fixed_put(pt, 0.1834, 0.5, 101.0, kModel.r));
}
BENCHMARK(BM_GreeksFixedPut);

void BM_IntegralsClosed(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(i_integrals_closed(2.0, 0.1, 0.5));
}
BENCHMARK(BM_IntegralsClosed);

void BM_IntegralsQuadrature(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(i_integrals_quadrature(2.0, 0.1, 0.5));
}
BENCHMARK(BM_IntegralsQuadrature);

void BM_FirstOrderPrice(benchmark::State& state) {
  const auto arc = arc_from_model(kModel);
  const auto spec = OptionSpec::fixed(OptionKind::Put, 0.5, 101.0);
  const MarketState st(0.1, 100.0, 98.0);
  for (auto _ : state) benchmark::DoNotOptimize(first_order_price(spec, st, arc, kModel, {-0.016}));
}
BENCHMARK(BM_FirstOrderPrice);

void BM_SmileCurve(benchmark::State& state) {
  const auto arc = arc_from_model(kModel);
  std::vector<SmileCell> grid{{0.0, 0.5, {0.97, 0.98, 0.99, 1.0, 1.01, 1.02, 1.03}}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(smile_curve(arc, kModel, -0.016, QuoteStyle::FixedPut, grid));
  }
}
BENCHMARK(BM_SmileCurve);

// Paths per second for both volatility models; threads as given.
void BM_MonteCarlo(benchmark::State& state) {
  McConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 100;
  cfg.n_threads = static_cast<unsigned>(state.range(1));
  const auto spec = OptionSpec::floating(OptionKind::Call, 0.5);
  const VolSpec vol = state.range(0) == 0 ? VolSpec{ConstantVol{0.1834}} : VolSpec{FullModel{}};
  ModelParams p = kModel;
  p.nu = 0.1;
  p.rho_xy = -0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(price_mc(spec, p, vol, MarketState::at_inception(100.0), cfg));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths);
}
BENCHMARK(BM_MonteCarlo)
    ->ArgNames({"full", "threads"})
    ->Args({0, 1})
    ->Args({1, 1})
    ->Args({1, 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
