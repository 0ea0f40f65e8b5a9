#include "canopy/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "canopy/error.hpp"

namespace canopy {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

EmbeddingMatrix normalize_rows(const EmbeddingMatrix& embeddings) {
  EmbeddingMatrix out(embeddings.kind(), embeddings.rows(), embeddings.cols());
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    const auto row = embeddings.row(i);
    const double norm = std::sqrt(dot(row, row));
    if (norm < 1e-12) {
      throw InvariantError("zero-norm embedding row " + std::to_string(i));
    }
    auto dst = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) dst[j] = row[j] / norm;
  }
  return out;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvariantError("cosine: dimension mismatch");
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na < 1e-12 || nb < 1e-12) throw InvariantError("cosine of zero vector");
  return clamp_unit(dot(a, b) / (na * nb));
}

DistanceMatrix cosine_distance_matrix(const EmbeddingMatrix& unit_rows) {
  const std::size_t n = unit_rows.rows();
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ri = unit_rows.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 1.0 - clamp_unit(dot(ri, unit_rows.row(j)));
      const float f = static_cast<float>(std::clamp(d, 0.0, 2.0));
      m.at(i, j) = f;
      m.at(j, i) = f;
    }
  }
  return m;
}

std::vector<double> centroid(const EmbeddingMatrix& unit_rows,
                             std::span<const std::size_t> members) {
  if (members.empty()) throw InvariantError("centroid of empty member set");
  std::vector<double> sum(unit_rows.cols(), 0.0);
  for (std::size_t idx : members) {
    const auto row = unit_rows.row(idx);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += row[j];
  }
  double norm = 0.0;
  for (double v : sum) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-12) {
    throw InvariantError("centroid direction vanished (antipodal members)");
  }
  for (double& v : sum) v /= norm;
  return sum;
}

std::vector<double> mean_intra_similarity(const EmbeddingMatrix& unit_rows,
                                          std::span<const std::size_t> members) {
  if (members.size() < 2) {
    throw InvariantError("mean_intra_similarity needs >= 2 members");
  }
  // For unit rows cos(i, j) = dot(i, j), so the per-member mean is
  // (dot(x_i, S) - 1) / (m - 1) with S the member sum. O(m*d) instead of
  // O(m^2*d).
  std::vector<double> sum(unit_rows.cols(), 0.0);
  for (std::size_t idx : members) {
    const auto row = unit_rows.row(idx);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += row[j];
  }
  std::vector<double> result;
  result.reserve(members.size());
  const double denom = static_cast<double>(members.size() - 1);
  for (std::size_t idx : members) {
    const double s = dot(unit_rows.row(idx), sum);
    result.push_back(clamp_unit((s - 1.0) / denom));
  }
  return result;
}

}  // namespace canopy
