#include <benchmark/benchmark.h>

#include "rejection/generate.hpp"
#include "rejection/losses.hpp"
#include "rejection/oracle.hpp"
#include "rejection/rejectors.hpp"
#include "rejection/sweep.hpp"

namespace {

using namespace rejection;

FiniteTask bench_task(int n_inputs, int n_labels) {
  TaskGenSpec spec;
  spec.n_inputs = n_inputs;
  spec.n_labels = n_labels;
  spec.seed = 1234;
  return generate_task(spec);
}

void BM_MarginalRatio(benchmark::State& state) {
  const FiniteTask task = bench_task(static_cast<int>(state.range(0)), 5);
  const Temperature lambda(2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        marginal_ratio(LossKind::modified_log_loss, task, lambda));
  }
}
BENCHMARK(BM_MarginalRatio)->Arg(8)->Arg(32)->Arg(64);

void BM_JointRatio(benchmark::State& state) {
  const FiniteTask task = bench_task(static_cast<int>(state.range(0)), 5);
  const Temperature lambda(2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        joint_ratio(LossKind::modified_log_loss, task, lambda));
  }
}
BENCHMARK(BM_JointRatio)->Arg(8)->Arg(32)->Arg(64);

void BM_MirrorDescentMarginal(benchmark::State& state) {
  const FiniteTask task = bench_task(static_cast<int>(state.range(0)), 3);
  const Temperature lambda(2.0);
  OracleConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_marginal_ideal(LossKind::log_loss, task, lambda, cfg));
  }
}
BENCHMARK(BM_MirrorDescentMarginal)->Arg(4)->Arg(16)->Arg(64);

void BM_ExhaustiveSearch(benchmark::State& state) {
  const FiniteTask task = bench_task(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exhaustive_rejector_search(
        LossKind::log_loss, task, RejectionCost(0.3)));
  }
}
BENCHMARK(BM_ExhaustiveSearch)->Arg(8)->Arg(12)->Arg(16);

void BM_SweepAutoGrid(benchmark::State& state) {
  const FiniteTask task = bench_task(static_cast<int>(state.range(0)), 4);
  const Temperature lambda(2.0);
  const DensityRatioRejector rejector =
      joint_ratio(LossKind::modified_log_loss, task, lambda);
  const auto grid = auto_tau_grid(rejector.scores);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep(task, LossKind::modified_log_loss, lambda,
                                   RatioKind::joint, grid));
  }
}
BENCHMARK(BM_SweepAutoGrid)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
