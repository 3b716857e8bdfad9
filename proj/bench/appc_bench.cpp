// Serial reference versus OpenMP kernels on benchmark-sized inputs.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "appc/excitation.hpp"
#include "appc/parallel.hpp"
#include "appc/scenario.hpp"

namespace {

struct Signal {
  std::vector<double> t;
  std::vector<std::vector<double>> v;
};

// A four-component regressor sampled at 1 kHz over 20 s.
const Signal& regressor() {
  static const Signal s = [] {
    Signal out;
    for (int i = 0; i <= 20000; ++i) {
      const double t = i * 1e-3;
      out.t.push_back(t);
      out.v.push_back({std::sin(t), std::cos(2.0 * t), std::exp(-0.1 * t), 1.0});
    }
    return out;
  }();
  return s;
}

void BM_PeWindowedSerial(benchmark::State& state) {
  const auto& s = regressor();
  for (auto _ : state) benchmark::DoNotOptimize(appc::pe_check_windowed_serial(s.t, s.v, 1.0, 20));
}

void BM_PeWindowedParallel(benchmark::State& state) {
  const auto& s = regressor();
  for (auto _ : state) benchmark::DoNotOptimize(appc::pe_check_windowed(s.t, s.v, 1.0, 20));
}

// Benchmark closed loop with a range of gamma0 values, 5 s at dt = 1e-3.
std::vector<appc::ClosedLoopProblem> gain_sweep() {
  const appc::Scenario base = appc::benchmark_scenario();
  std::vector<appc::ClosedLoopProblem> out;
  for (double g : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 200.0}) {
    appc::ClosedLoopProblem p = base.problem(appc::AdaptiveLaw::memory);
    p.estimator.schedule.gamma0 = g;
    out.push_back(p);
  }
  return out;
}

appc::SimConfig sweep_sim() {
  appc::SimConfig sim;
  sim.dt = 1e-3;
  sim.t_end = 5.0;
  sim.record_stride = 10;
  return sim;
}

void BM_RunBatchSerial(benchmark::State& state) {
  const auto problems = gain_sweep();
  for (auto _ : state) benchmark::DoNotOptimize(appc::run_batch_serial(problems, sweep_sim()));
}

void BM_RunBatchParallel(benchmark::State& state) {
  const auto problems = gain_sweep();
  for (auto _ : state) benchmark::DoNotOptimize(appc::run_batch(problems, sweep_sim()));
}

}  // namespace

BENCHMARK(BM_PeWindowedSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PeWindowedParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunBatchSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunBatchParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
