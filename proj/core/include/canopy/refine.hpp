#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canopy/hdbscan.hpp"

namespace canopy {

// How eliminated samples are regrouped: connected components of the
// above-threshold similarity graph (default), or complete-linkage groups
// where every pair clears the threshold.
enum class OutlierGrouping { components, cliques };

struct RefineToggles {
  bool elim = true;
  bool merge = true;
  bool reassign = true;
};

struct RefineParams {
  double outlier_frac = 0.16;
  double sim_thresh_merge = 0.68;
  double sim_thresh_outliers = 0.53;
  double sim_thresh_reassign = 0.57;
  int n_iter = 5;
  RefineToggles toggles;
  OutlierGrouping grouping = OutlierGrouping::components;
};

struct RefineIterationCounts {
  std::size_t eliminated = 0;
  std::size_t merges = 0;
  std::size_t grouped_outliers = 0;
  std::size_t new_clusters = 0;
  std::size_t reassigned = 0;
};

struct RefineTrace {
  std::vector<RefineIterationCounts> iterations;
  std::size_t promoted_singletons = 0;

  std::string to_json() const;
};

struct RefineResult {
  ClusterLabels labels;         // after singleton promotion
  ClusterLabels pre_promotion;  // noise still marked, for coverage
  // Snapshot right after the last executed elimination stage (the initial
  // labels when elimination never ran); the elimination-policy comparison
  // scores agreement on these assignments.
  ClusterLabels post_last_elimination;
  RefineTrace trace;
};

struct EliminationResult {
  ClusterLabels labels;
  std::vector<std::size_t> eliminated;  // records newly marked noise
};

// Per cluster of size >= 3 marks the floor(outlier_frac * size) members with
// the lowest mean intra-cluster similarity as noise; similarity ties shed the
// lower record index first.
EliminationResult eliminate_outliers(const ClusterLabels& labels,
                                     const EmbeddingMatrix& visual_unit,
                                     double outlier_frac);

// Control arm for the elimination study: same per-cluster count, uniformly
// random member choice.
EliminationResult eliminate_random(const ClusterLabels& labels,
                                   double outlier_frac, std::uint64_t seed);

// Greedy highest-first merging of cluster centroids strictly above the
// threshold, recomputing the merged centroid after every merge. Similarity
// ties resolve to the lexicographically smallest (id, id) pair.
ClusterLabels merge_clusters(const ClusterLabels& labels,
                             const EmbeddingMatrix& visual_unit,
                             double sim_thresh_merge,
                             std::size_t* merges_out = nullptr);

struct GroupingResult {
  ClusterLabels labels;
  std::size_t grouped = 0;       // outliers absorbed into new clusters
  std::size_t new_clusters = 0;
};

// Groups the current noise pool: components (or cliques) of size >= 2 in the
// strictly-above-threshold similarity graph become new clusters.
GroupingResult group_outliers(const ClusterLabels& labels,
                              const EmbeddingMatrix& visual_unit,
                              double sim_thresh_outliers,
                              OutlierGrouping mode = OutlierGrouping::components);

// Batch reassignment of the noise pool against centroids frozen for the whole
// pass; an outlier joins its argmax-cosine cluster iff the cosine is strictly
// above the threshold (tie -> smaller cluster id).
ClusterLabels reassign_outliers(const ClusterLabels& labels,
                                const EmbeddingMatrix& visual_unit,
                                double sim_thresh_reassign,
                                std::size_t* reassigned_out = nullptr);

// Every remaining noise record becomes its own cluster; ids recanonicalized.
ClusterLabels promote_singletons(const ClusterLabels& labels,
                                 std::size_t* promoted_out = nullptr);

// The full iterative loop: n_iter repetitions of eliminate, group, reassign,
// then merge on the updated compositions, with disabled stages skipped;
// singleton promotion runs once after the loop. Grouping rides the elim
// toggle: it exists to reclaim the samples elimination sheds.
RefineResult refine(const ClusterLabels& initial,
                    const EmbeddingMatrix& visual_unit,
                    const RefineParams& params);

// Identical loop but with random elimination of matching per-cluster size.
RefineResult refine_random_elimination(const ClusterLabels& initial,
                                       const EmbeddingMatrix& visual_unit,
                                       const RefineParams& params,
                                       std::uint64_t seed);

}  // namespace canopy
