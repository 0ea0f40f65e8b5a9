#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "canopy/similarity.hpp"

namespace canopy {

inline constexpr int kNoise = -1;

// Per-record cluster assignment. Non-noise ids are 0-based, contiguous, and
// assigned in order of first member appearance.
struct ClusterLabels {
  std::vector<int> labels;
  int num_clusters = 0;
};

// Relabels non-noise ids to the canonical first-appearance order.
ClusterLabels canonicalize_labels(std::span<const int> labels);

// Member lists per cluster id, each ascending by record index.
std::vector<std::vector<std::size_t>> cluster_members(const ClusterLabels& l);

struct MstEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;  // u < v
  float w = 0.0f;
};

// Distance from each point to its min_samples-th nearest other point.
std::vector<float> core_distances(const DistanceMatrix& d, int min_samples);

// M[i][j] = max(core_i, core_j, D[i][j]) off-diagonal, 0 on the diagonal.
DistanceMatrix mutual_reachability(const DistanceMatrix& d,
                                   std::span<const float> cores);

// Prim over the dense matrix; n-1 edges sorted ascending by
// (w, min index, max index).
std::vector<MstEdge> minimum_spanning_tree(const DistanceMatrix& m);

// Condensed-tree construction and excess-of-mass selection. Splits that shed
// components smaller than min_cluster_size drop those points out of the
// parent; the root itself is selectable, so a single uniform blob yields one
// cluster rather than all noise. Points never absorbed into a selected
// cluster get kNoise.
ClusterLabels extract_clusters(const std::vector<MstEdge>& mst, std::size_t n,
                               int min_cluster_size);

ClusterLabels hdbscan(const DistanceMatrix& d, int min_cluster_size,
                      int min_samples);

}  // namespace canopy
