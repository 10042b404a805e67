// Serial reference against the OpenMP kernels on the same work.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "fpplab/config.hpp"
#include "fpplab/ineqlab.hpp"

using namespace fpplab;

namespace {

SweepConfig bench_config(const char* model, int n, int replicas) {
  return parse_config(std::string("model = ") + model + "\nn = " + std::to_string(n) +
                      "\nreplicas = " + std::to_string(replicas) +
                      (std::string(model) == "fpp-torus" ? "\ndist = bernoulli:1,2,0.5\n" : "\n"));
}

void BM_SweepSerial(benchmark::State& state, const char* model) {
  const auto c = bench_config(model, static_cast<int>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(c));
  state.SetItemsProcessed(state.iterations() * c.replicas);
}

void BM_SweepParallel(benchmark::State& state, const char* model) {
  const auto c = bench_config(model, static_cast<int>(state.range(0)), 32);
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(c));
  state.SetItemsProcessed(state.iterations() * c.replicas);
  state.counters["threads"] = omp_get_max_threads();
}

void BM_IneqSuite(benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ineq::run_suite("efron-stein", 2000, 1, threads));
  state.counters["threads"] = threads ? threads : omp_get_max_threads();
}

}  // namespace

BENCHMARK_CAPTURE(BM_SweepSerial, fpp_point, "fpp-point")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SweepParallel, fpp_point, "fpp-point")->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SweepSerial, fpp_torus, "fpp-torus")->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SweepParallel, fpp_torus, "fpp-torus")->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SweepSerial, lpp, "lpp")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SweepParallel, lpp, "lpp")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_IneqSuite)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
