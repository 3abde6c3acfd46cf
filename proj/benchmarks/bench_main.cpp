#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hyperu/calibrate.hpp"
#include "hyperu/inference.hpp"
#include "hyperu/random.hpp"
#include "hyperu/simulate.hpp"
#include "hyperu/spectral.hpp"

namespace {

using namespace hyperu;

ModelConfig model(Model m, double length) {
  ModelConfig c;
  c.model = m;
  c.dim = 2;
  c.box_length = length;
  return c;
}

void BM_SpectralSample(benchmark::State& state) {
  const double L = static_cast<double>(state.range(0));
  const WaveGrid grid = build_wave_grid(2, L, 0.75);
  const PointPattern p = simulate(model(Model::poisson, L), 7);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_sample(p, grid));
  state.counters["points"] = static_cast<double>(p.size());
  state.counters["vectors"] = static_cast<double>(grid.size());
}
BENCHMARK(BM_SpectralSample)->Arg(35)->Arg(100)->Unit(benchmark::kMicrosecond);

// One null replicate: exponential draws plus the full fit.
void BM_NullReplicate(benchmark::State& state) {
  const auto kappas = build_wave_grid(2, static_cast<double>(state.range(0)), 0.75).kappas();
  std::vector<double> x(kappas.size());
  std::uint64_t r = 0;
  for (auto _ : state) {
    auto rng = make_stream(11, r++);
    std::exponential_distribution<double> e(1.0);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = kappas[j] * e(rng);
    benchmark::DoNotOptimize(lr_statistic({kappas, x}));
  }
  state.counters["n"] = static_cast<double>(kappas.size());
}
BENCHMARK(BM_NullReplicate)->Arg(35)->Arg(300)->Unit(benchmark::kMicrosecond);

void BM_Simulate(benchmark::State& state) {
  const auto m = static_cast<Model>(state.range(0));
  const ModelConfig c = model(m, 35.0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(c, seed++));
  state.SetLabel(std::string(model_name(m)));
}
BENCHMARK(BM_Simulate)
    ->Arg(static_cast<int>(Model::poisson))
    ->Arg(static_cast<int>(Model::thomas))
    ->Arg(static_cast<int>(Model::rsa))
    ->Arg(static_cast<int>(Model::url))
    ->Arg(static_cast<int>(Model::matching))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
