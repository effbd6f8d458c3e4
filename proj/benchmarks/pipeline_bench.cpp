#include <benchmark/benchmark.h>

#include <random>

#include "exactbn/local_scores.hpp"
#include "exactbn/optimizer.hpp"

namespace {

using namespace exactbn;

/// Column v copies column v-1 with probability 0.7, otherwise a fresh value.
Dataset chain_data(int n, std::size_t rows, Arity arity) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(n) * 1000 + rows);
  std::uniform_int_distribution<Value> value(0, static_cast<Value>(arity - 1));
  std::bernoulli_distribution copy(0.7);
  std::vector<Value> cells(rows * static_cast<std::size_t>(n));
  for (std::size_t r = 0; r < rows; ++r) {
    Value* x = cells.data() + r * static_cast<std::size_t>(n);
    x[0] = value(rng);
    for (int v = 1; v < n; ++v) x[v] = copy(rng) ? x[v - 1] : value(rng);
  }
  return Dataset(std::vector<Arity>(static_cast<std::size_t>(n), arity), std::move(cells));
}

void BM_LocalScores(benchmark::State& state) {
  const Dataset d = chain_data(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(compute_all(d, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.num_vars()) << (d.num_vars() - 1));
}
BENCHMARK(BM_LocalScores)->Args({10, 1000})->Args({12, 5000})->Args({14, 20000})->Unit(benchmark::kMillisecond);

void BM_LocalScoresSparse(benchmark::State& state) {
  const Dataset d = chain_data(static_cast<int>(state.range(0)), 5000, 3);
  TraversalOptions opts;
  opts.dense_cell_limit = 1;
  for (auto _ : state) benchmark::DoNotOptimize(compute_all(d, {}, opts));
}
BENCHMARK(BM_LocalScoresSparse)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_BestParents(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LocalScoreStore store = compute_all(chain_data(n, 500, 2), {});
  for (auto _ : state) benchmark::DoNotOptimize(best_parents(store));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * (n - 1) << (n - 2));
}
BENCHMARK(BM_BestParents)->DenseRange(12, 16, 2)->Unit(benchmark::kMillisecond);

void BM_BestSinks(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BestParentStore best = best_parents(compute_all(chain_data(n, 500, 2), {}));
  for (auto _ : state) benchmark::DoNotOptimize(best_sinks(best));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) << (n - 1));
}
BENCHMARK(BM_BestSinks)->DenseRange(12, 16, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
