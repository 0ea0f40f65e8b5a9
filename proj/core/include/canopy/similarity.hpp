#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "canopy/corpus.hpp"

namespace canopy {

// Dense symmetric cosine-distance matrix, zero diagonal, values in [0, 2].
// 32-bit storage: the only full matrix in the pipeline is the spatial one,
// and float halves its footprint at desk scale.
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<float> values;  // row-major n*n

  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n_) : n(n_), values(n_ * n_, 0.0f) {}

  float at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  float& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

// Unit-normalizes every row (Euclidean). Errors on a zero-norm row.
EmbeddingMatrix normalize_rows(const EmbeddingMatrix& embeddings);

// cos(a, b) clamped to [-1, 1]; errors on zero vectors.
double cosine(std::span<const double> a, std::span<const double> b);

// D[i][j] = 1 - cos(row_i, row_j); expects unit rows.
DistanceMatrix cosine_distance_matrix(const EmbeddingMatrix& unit_rows);

// Renormalized mean of the member unit rows. Errors on an empty member set
// or when the mean direction vanishes (antipodal members).
std::vector<double> centroid(const EmbeddingMatrix& unit_rows,
                             std::span<const std::size_t> members);

// For each member i, the mean cosine to the other members. Needs >= 2
// members; expects unit rows.
std::vector<double> mean_intra_similarity(const EmbeddingMatrix& unit_rows,
                                          std::span<const std::size_t> members);

}  // namespace canopy
