#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace canopy {

// One geotagged tree. `genus` is ground truth carried for evaluation only;
// the clustering pipeline never reads it.
struct TreeRecord {
  std::string tree_id;
  double lat = 0.0;  // degrees WGS84, [-90, 90]
  double lon = 0.0;  // degrees WGS84, [-180, 180]
  std::optional<std::string> genus;
};

enum class EmbeddingKind { visual, spatial };

// Row-major n x d matrix of finite values; row i belongs to record i.
// Alignment is by row order, not id lookup.
class EmbeddingMatrix {
public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(EmbeddingKind kind, std::size_t n, std::size_t d)
      : kind_(kind), n_(n), d_(d), values_(n * d, 0.0) {}

  EmbeddingKind kind() const { return kind_; }
  std::size_t rows() const { return n_; }
  std::size_t cols() const { return d_; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  std::span<double> row(std::size_t i) { return {values_.data() + i * d_, d_}; }

  double at(std::size_t i, std::size_t j) const { return values_[i * d_ + j]; }
  double& at(std::size_t i, std::size_t j) { return values_[i * d_ + j]; }

  const std::vector<double>& values() const { return values_; }

private:
  EmbeddingKind kind_ = EmbeddingKind::visual;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
};

// Local equirectangular grid. Origin sits at the dataset's minimum (lat, lon)
// corner so in-bounds indices are non-negative; mean_lat fixes the projection
// latitude.
struct GridSpec {
  double cell_size_m = 500.0;
  double origin_lat = 0.0;
  double origin_lon = 0.0;
  double mean_lat = 0.0;

  static GridSpec from_records(const std::vector<TreeRecord>& records,
                               double cell_size_m);
};

struct CellId {
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  auto operator<=>(const CellId&) const = default;
};

inline constexpr double kEarthRadiusM = 6'371'000.0;

// Meters east/north of the grid origin.
struct LocalXY {
  double x = 0.0;
  double y = 0.0;
};

LocalXY project_local(double lat, double lon, const GridSpec& spec);
// Inverse of project_local; returns (lat, lon).
std::pair<double, double> unproject_local(double x, double y,
                                          const GridSpec& spec);

CellId cell_of(double lat, double lon, const GridSpec& spec);
std::vector<CellId> assign_grid(const std::vector<TreeRecord>& records,
                                const GridSpec& spec);

// CSV with header `tree_id,lat,lon[,genus]`. Errors carry the 1-based data
// row number.
std::vector<TreeRecord> load_trees(const std::string& path);
void save_trees(const std::vector<TreeRecord>& records, const std::string& path);

// Binary embedding file: magic "EMB1", u32-LE n, u32-LE d, then n*d f32-LE
// row-major. Round-trips bit-exactly.
EmbeddingMatrix load_embeddings(const std::string& path, std::size_t expected_n,
                                EmbeddingKind kind);
void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path);

}  // namespace canopy
