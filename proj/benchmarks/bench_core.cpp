// Micro benchmarks for the hot paths: the balance fixed point on dense and
// greedy designs, the scalar balance root, the greedy partitioner (with its
// measured scaling in the UE count), the Cholesky log-determinant and one
// Monte-Carlo fading trial. Worker threads are pinned to one so the numbers
// reflect the kernels, not the scheduler.

#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <cstdint>

#include "ldsnoma/allocator.hpp"
#include "ldsnoma/detequiv.hpp"
#include "ldsnoma/montecarlo.hpp"
#include "ldsnoma/parallel.hpp"
#include "ldsnoma/random.hpp"
#include "ldsnoma/scenario.hpp"
#include "ldsnoma/spreading.hpp"

namespace {

using namespace ldsnoma;

FixedPointOptions experiment_budget() {
  FixedPointOptions opts;
  opts.max_iter = 200000;
  return opts;
}

void BM_FixedPointDense(benchmark::State& state) {
  const Scenario scn = make_drop(50, 150, 2, RandomStream(42));
  const SpreadingMatrix v = dense_spreading(scn);
  const FixedPointOptions opts = experiment_budget();
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_point(scn, v, opts));
}
BENCHMARK(BM_FixedPointDense);

void BM_FixedPointGreedy(benchmark::State& state) {
  const Scenario scn = make_drop(50, 150, 2, RandomStream(42));
  const SpreadingMatrix v = greedy_partition(scn);
  const FixedPointOptions opts = experiment_budget();
  for (auto _ : state) benchmark::DoNotOptimize(solve_fixed_point(scn, v, opts));
}
BENCHMARK(BM_FixedPointGreedy);

void BM_BalanceRoot(benchmark::State& state) {
  const Scenario scn = make_drop(50, 150, 2, RandomStream(5));
  for (auto _ : state) benchmark::DoNotOptimize(solve_r_star(scn));
}
BENCHMARK(BM_BalanceRoot);

/// Scaling of the full design construction in K at F = 50, d = 2. The
/// sort is O(dK log dK) and each placement scans F sub-channels, so the
/// fitted exponent should sit very close to linear; the Complexity() report
/// prints the measured fit.
void BM_GreedyPartition(benchmark::State& state) {
  const int num_ues = static_cast<int>(state.range(0));
  const Scenario scn = make_drop(50, num_ues, 2, RandomStream(7));
  for (auto _ : state) benchmark::DoNotOptimize(greedy_partition(scn));
  state.SetComplexityN(num_ues);
}
BENCHMARK(BM_GreedyPartition)->Arg(75)->Arg(150)->Arg(300)->Arg(600)->Complexity();

void BM_LogdetHermitian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RandomStream rng(3);
  Eigen::MatrixXcd b(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) b(i, j) = rng.complex_gaussian();
  const Eigen::MatrixXcd m =
      (b * b.adjoint() + Eigen::MatrixXcd::Identity(n, n)).eval();
  for (auto _ : state) benchmark::DoNotOptimize(logdet_hermitian(m));
}
BENCHMARK(BM_LogdetHermitian)->Arg(50)->Arg(100);

void BM_MonteCarloTrial(benchmark::State& state) {
  const Scenario scn = make_drop(50, 100, 2, RandomStream(9));
  const SpreadingMatrix v = dense_spreading(scn);
  std::uint64_t offset = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_emi(scn, v, 1, RandomStream(11), offset++));
}
BENCHMARK(BM_MonteCarloTrial);

}  // namespace

int main(int argc, char** argv) {
  ldsnoma::set_thread_count(1);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
