#include <benchmark/benchmark.h>

#include "canopy/pipeline.hpp"
#include "canopy/similarity.hpp"
#include "canopy/synth.hpp"

namespace {

using namespace canopy;

SynthConfig bench_config(int n_trees) {
  SynthConfig config;
  config.n_trees = n_trees;
  config.n_streets = std::max(4, n_trees / 125);
  config.n_genera = 10;
  config.seed = 1234;
  return config;
}

void BM_CosineDistanceMatrix(benchmark::State& state) {
  const auto city = generate_city(bench_config(static_cast<int>(state.range(0))));
  const auto unit = normalize_rows(city.spatial);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cosine_distance_matrix(unit));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_CosineDistanceMatrix)->Arg(500)->Arg(1000)->Arg(2000);

void BM_Hdbscan(benchmark::State& state) {
  const auto city = generate_city(bench_config(static_cast<int>(state.range(0))));
  const auto unit = normalize_rows(city.spatial);
  const auto matrix = cosine_distance_matrix(unit);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hdbscan(matrix, 2, 3));
  }
}
BENCHMARK(BM_Hdbscan)->Arg(500)->Arg(1000)->Arg(2000);

void BM_RefineLoop(benchmark::State& state) {
  const auto city = generate_city(bench_config(static_cast<int>(state.range(0))));
  const auto dataset = city.to_dataset();
  const Pipeline pipeline(dataset);
  const PipelineParams params;
  const auto initial = hdbscan(pipeline.spatial_distances(),
                               params.min_cluster_size, params.min_samples);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        refine(initial, pipeline.visual_unit(), params.refine));
  }
}
BENCHMARK(BM_RefineLoop)->Arg(500)->Arg(1000)->Arg(2000);

void BM_FullPipeline(benchmark::State& state) {
  const auto city = generate_city(bench_config(static_cast<int>(state.range(0))));
  const auto dataset = city.to_dataset();
  for (auto _ : state) {
    const Pipeline pipeline(dataset);
    benchmark::DoNotOptimize(pipeline.run(PipelineParams{}));
  }
}
BENCHMARK(BM_FullPipeline)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
