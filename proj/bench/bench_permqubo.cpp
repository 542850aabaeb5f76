// Serial reference vs OpenMP kernels. Thread count follows PERMQUBO_THREADS.

#include <benchmark/benchmark.h>

#include "permqubo/anneal.hpp"
#include "permqubo/instances.hpp"
#include "permqubo/pipeline.hpp"
#include "permqubo/qubo.hpp"
#include "permqubo/rng.hpp"
#include "permqubo/stitch.hpp"

using namespace permqubo;

namespace {

Matrix random_cities(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts(n);
  for (auto& p : pts) p = {1000.0 * uniform01(rng), 1000.0 * uniform01(rng)};
  return euc2d_matrix(pts);
}

void anneal_tsp(benchmark::State& state, Execution ex) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix d = random_cities(n, 1);
  const QuboModel m = build_permutation_qubo(d, 0.6 * d.max_abs(), Topology::Cycle);
  AnnealConfig cfg = default_anneal_config(m, 7, 200);
  cfg.execution = ex;
  for (auto _ : state) benchmark::DoNotOptimize(solve(m, cfg).best_energy);
  state.counters["proposals/s"] = benchmark::Counter(
      static_cast<double>(cfg.replicas) * cfg.sweeps * static_cast<double>(m.size()), benchmark::Counter::kIsIterationInvariantRate);
}

void BM_AnnealSerial(benchmark::State& s) { anneal_tsp(s, Execution::Serial); }
void BM_AnnealParallel(benchmark::State& s) { anneal_tsp(s, Execution::Parallel); }

void BM_AnnealDenseReference(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix d = random_cities(n, 1);
  const QuboModel m = build_permutation_qubo(d, 0.6 * d.max_abs(), Topology::Cycle);
  AnnealConfig cfg = default_anneal_config(m, 7, 20);
  for (auto _ : state) benchmark::DoNotOptimize(reference::solve_dense(m, cfg).best_energy);
}

std::vector<std::vector<int>> cluster_tours(std::size_t n, std::size_t k) {
  std::vector<std::vector<int>> out(k);
  for (std::size_t i = 0; i < n; ++i) out[i % k].push_back(static_cast<int>(i));
  return out;
}

void BM_MergeMatrixSerial(benchmark::State& state) {
  const Matrix d = random_cities(400, 2);
  const auto tours = cluster_tours(400, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::merge_matrix_serial(tours, d).delta(0, 1));
}

void BM_MergeMatrixParallel(benchmark::State& state) {
  const Matrix d = random_cities(400, 2);
  const auto tours = cluster_tours(400, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(merge_matrix(tours, d, Execution::Parallel).delta(0, 1));
}

void brute(benchmark::State& state, Execution ex) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  Matrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) q(i, j) = q(j, i) = 2.0 * uniform01(rng) - 1.0;
  const QuboModel m = QuboModel::from_dense(q);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force(m, ex).best_energy);
}

void BM_BruteForceSerial(benchmark::State& s) { brute(s, Execution::Serial); }
void BM_BruteForceParallel(benchmark::State& s) { brute(s, Execution::Parallel); }

}  // namespace

BENCHMARK(BM_AnnealSerial)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnnealParallel)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnnealDenseReference)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MergeMatrixSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MergeMatrixParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceSerial)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceParallel)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  apply_thread_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
