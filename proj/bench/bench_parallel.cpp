// Serial reference vs OpenMP paths of the batch and sweep kernels.
//
//   ./build/bench/bench_parallel --benchmark_filter=Residual
//   OMP_NUM_THREADS=8 ./build/bench/bench_parallel

#include <benchmark/benchmark.h>

#include "sleigh/analysis.hpp"
#include "sleigh/config.hpp"
#include "sleigh/integrator.hpp"

namespace {

using sleigh::Execution;

const sleigh::RunConfig& paper() {
  static const sleigh::RunConfig cfg = sleigh::parse_run_config(sleigh::default_config_toml());
  return cfg;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "openmp"); }

void BM_BatchSimulate(benchmark::State& state) {
  const auto& cfg = paper();
  auto icfg = cfg.integrator;
  icfg.t_final = 20.0;
  std::vector<sleigh::QState> initials;
  for (int rep = 0; rep < 2; ++rep) {
    for (const auto& s : cfg.scenarios) initials.push_back(s.initial);
  }
  for (auto _ : state) {
    auto out = sleigh::batch_simulate(initials, cfg.model, cfg.controller, icfg, exec_of(state));
    benchmark::DoNotOptimize(out);
  }
  label(state);
}
BENCHMARK(BM_BatchSimulate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ResidualSearch(benchmark::State& state) {
  sleigh::ResidualSearchSpec spec;
  for (auto _ : state) {
    auto r = sleigh::equilibrium_residual_search(paper().controller.potential_gains(), spec, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}
BENCHMARK(BM_ResidualSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Matching(benchmark::State& state) {
  sleigh::MatchingSpec spec;
  spec.samples = 20000;
  for (auto _ : state) {
    auto r = sleigh::check_matching(paper().model, paper().controller, spec, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}
BENCHMARK(BM_Matching)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SchwarzSweep(benchmark::State& state) {
  sleigh::SchwarzSweepSpec spec;
  for (auto _ : state) {
    auto r = sleigh::schwarz_sweep(spec, exec_of(state));
    benchmark::DoNotOptimize(r);
  }
  label(state);
}
BENCHMARK(BM_SchwarzSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
