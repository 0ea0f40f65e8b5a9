#include <benchmark/benchmark.h>

#include <vector>

#include "canopy/diversity.hpp"
#include "canopy/evaluate.hpp"
#include "canopy/rng.hpp"

namespace {

using namespace canopy;

std::vector<double> random_field(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(0.0, 3.5);
  return v;
}

void BM_Wasserstein1(benchmark::State& state) {
  const auto a = random_field(static_cast<std::size_t>(state.range(0)), 1);
  const auto b = random_field(static_cast<std::size_t>(state.range(0)) + 7, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(wasserstein1(a, b));
  }
}
BENCHMARK(BM_Wasserstein1)->Arg(100)->Arg(1000)->Arg(10000);

void BM_MoransIPermutation(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  std::vector<CellId> cells;
  std::vector<double> field;
  Rng rng(3);
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) {
      cells.push_back({x, y});
      field.push_back(static_cast<double>(x) + rng.uniform(0.0, 3.0));
    }
  }
  const auto adjacency = grid_adjacency(cells, Adjacency::queen);
  for (auto _ : state) {
    benchmark::DoNotOptimize(morans_i(field, adjacency, 999, 17));
  }
}
BENCHMARK(BM_MoransIPermutation)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_ShannonField(benchmark::State& state) {
  Rng rng(5);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<CellId> cells;
  std::vector<int> taxa;
  for (std::size_t i = 0; i < n; ++i) {
    cells.push_back({static_cast<std::int64_t>(rng.uniform_index(40)),
                     static_cast<std::int64_t>(rng.uniform_index(40))});
    taxa.push_back(static_cast<int>(rng.uniform_index(20)));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(diversity_field(cells, taxa));
  }
}
BENCHMARK(BM_ShannonField)->Arg(10000)->Arg(100000);

void BM_BootstrapRmse(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto truth = random_field(n, 7);
  const auto pred = random_field(n, 8);
  auto metric = [&](std::span<const std::size_t> idx) {
    std::vector<double> a, b;
    a.reserve(idx.size());
    b.reserve(idx.size());
    for (std::size_t i : idx) {
      a.push_back(pred[i]);
      b.push_back(truth[i]);
    }
    return rmse(a, b);
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_ci(n, metric, 1000, 0.95, 11));
  }
}
BENCHMARK(BM_BootstrapRmse)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace
