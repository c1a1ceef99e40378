#include <benchmark/benchmark.h>

#include "vbi/experiment.hpp"
#include "vbi/freq.hpp"

namespace {

vbi::ExperimentConfig hmc_config(const char* scenario) {
  vbi::ExperimentConfig c;
  c.scenario = scenario;
  c.M = 4;
  c.K = 4;
  c.n = 500;
  c.trials = 64;
  c.seed = 1;
  c.ebn0_db = {10.0};
  c.rho = {0.9};
  c.timing = false;
  return c;
}

void BM_HmcSerial(benchmark::State& st) {
  const auto c = hmc_config(st.range(0) ? "fading" : "awgn");
  for (auto _ : st) benchmark::DoNotOptimize(vbi::run_experiment_serial(c));
}

void BM_HmcParallel(benchmark::State& st) {
  auto c = hmc_config(st.range(0) ? "fading" : "awgn");
  c.jobs = static_cast<int>(st.range(1));
  for (auto _ : st) benchmark::DoNotOptimize(vbi::run_experiment(c));
}

void BM_Freq(benchmark::State& st) {
  vbi::FreqConfig c;
  c.trials = 200;
  c.seed = 1;
  c.jobs = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(vbi::run_freq_experiment(c));
}

}  // namespace

BENCHMARK(BM_HmcSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HmcParallel)->Args({0, 1})->Args({0, 2})->Args({0, 4})->Args({1, 2})->Args({1, 4})
    ->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Freq)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
