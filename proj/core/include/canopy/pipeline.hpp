#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "canopy/corpus.hpp"
#include "canopy/refine.hpp"

namespace canopy {

// Everything one city run needs, aligned by record index.
struct Dataset {
  std::vector<TreeRecord> records;
  EmbeddingMatrix visual;
  EmbeddingMatrix spatial;
  GridSpec grid;
  std::vector<CellId> cells;

  static Dataset assemble(std::vector<TreeRecord> records,
                          EmbeddingMatrix visual, EmbeddingMatrix spatial,
                          double cell_size_m);
};

struct PipelineParams {
  int min_cluster_size = 2;
  int min_samples = 3;
  RefineParams refine;

  std::string to_json() const;
  static PipelineParams from_json(const std::string& text);
};

// Throws InvariantError when a parameter leaves its tuned search range.
void validate_params(const PipelineParams& params);

struct PipelineResult {
  ClusterLabels initial;        // HDBSCAN output
  ClusterLabels pre_promotion;  // after the refine loop, noise still marked
  ClusterLabels post_last_elimination;  // snapshot for the elimination study
  ClusterLabels labels;         // final, promotion-complete
  RefineTrace trace;
};

// Spatial pseudo-clustering plus visual refinement. The spatial cosine
// distance matrix is cached so parameter sweeps pay for it once.
class Pipeline {
public:
  explicit Pipeline(const Dataset& dataset);

  PipelineResult run(const PipelineParams& params) const;
  PipelineResult run_random_elimination(const PipelineParams& params,
                                        std::uint64_t seed) const;

  const Dataset& dataset() const { return *dataset_; }
  const EmbeddingMatrix& visual_unit() const { return visual_unit_; }
  const DistanceMatrix& spatial_distances() const;

private:
  ClusterLabels initial_labels(const PipelineParams& params) const;

  const Dataset* dataset_;
  EmbeddingMatrix visual_unit_;
  EmbeddingMatrix spatial_unit_;
  mutable std::optional<DistanceMatrix> spatial_dist_;
};

}  // namespace canopy
