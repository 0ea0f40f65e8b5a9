#include "canopy/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "canopy/error.hpp"

namespace canopy {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double parse_double(const std::string& text, std::size_t row,
                    const char* field) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw IngestError("row " + std::to_string(row) + ": malformed " + field +
                      " value '" + text + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

GridSpec GridSpec::from_records(const std::vector<TreeRecord>& records,
                                double cell_size_m) {
  if (records.empty()) throw InvariantError("grid spec needs at least one record");
  if (cell_size_m <= 0.0) throw InvariantError("cell_size_m must be positive");
  GridSpec spec;
  spec.cell_size_m = cell_size_m;
  spec.origin_lat = records.front().lat;
  spec.origin_lon = records.front().lon;
  double lat_sum = 0.0;
  for (const auto& r : records) {
    spec.origin_lat = std::min(spec.origin_lat, r.lat);
    spec.origin_lon = std::min(spec.origin_lon, r.lon);
    lat_sum += r.lat;
  }
  spec.mean_lat = lat_sum / static_cast<double>(records.size());
  return spec;
}

LocalXY project_local(double lat, double lon, const GridSpec& spec) {
  LocalXY p;
  p.x = kEarthRadiusM * (lon - spec.origin_lon) * kDegToRad *
        std::cos(spec.mean_lat * kDegToRad);
  p.y = kEarthRadiusM * (lat - spec.origin_lat) * kDegToRad;
  return p;
}

std::pair<double, double> unproject_local(double x, double y,
                                          const GridSpec& spec) {
  const double lat = spec.origin_lat + y / (kEarthRadiusM * kDegToRad);
  const double lon =
      spec.origin_lon +
      x / (kEarthRadiusM * kDegToRad * std::cos(spec.mean_lat * kDegToRad));
  return {lat, lon};
}

CellId cell_of(double lat, double lon, const GridSpec& spec) {
  const LocalXY p = project_local(lat, lon, spec);
  return CellId{static_cast<std::int64_t>(std::floor(p.x / spec.cell_size_m)),
                static_cast<std::int64_t>(std::floor(p.y / spec.cell_size_m))};
}

std::vector<CellId> assign_grid(const std::vector<TreeRecord>& records,
                                const GridSpec& spec) {
  if (records.empty()) throw InvariantError("assign_grid: empty record set");
  std::vector<CellId> cells;
  cells.reserve(records.size());
  for (const auto& r : records) cells.push_back(cell_of(r.lat, r.lon, spec));
  return cells;
}

std::vector<TreeRecord> load_trees(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open tree file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty tree file '" + path + "'");
  line = strip_cr(line);
  bool has_genus = false;
  if (line == "tree_id,lat,lon") {
    has_genus = false;
  } else if (line == "tree_id,lat,lon,genus") {
    has_genus = true;
  } else {
    throw IngestError("unexpected header '" + line +
                      "' (want tree_id,lat,lon[,genus])");
  }

  std::vector<TreeRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    ++row;
    const auto fields = split_csv_line(line);
    const std::size_t expected = has_genus ? 4 : 3;
    if (fields.size() != expected) {
      throw IngestError("row " + std::to_string(row) + ": expected " +
                        std::to_string(expected) + " fields, got " +
                        std::to_string(fields.size()));
    }
    TreeRecord r;
    r.tree_id = fields[0];
    if (r.tree_id.empty()) {
      throw IngestError("row " + std::to_string(row) + ": empty tree_id");
    }
    if (!seen_ids.insert(r.tree_id).second) {
      throw IngestError("row " + std::to_string(row) + ": duplicate tree_id '" +
                        r.tree_id + "'");
    }
    r.lat = parse_double(fields[1], row, "lat");
    r.lon = parse_double(fields[2], row, "lon");
    if (r.lat < -90.0 || r.lat > 90.0) {
      throw IngestError("row " + std::to_string(row) + ": lat " + fields[1] +
                        " out of range [-90, 90]");
    }
    if (r.lon < -180.0 || r.lon > 180.0) {
      throw IngestError("row " + std::to_string(row) + ": lon " + fields[2] +
                        " out of range [-180, 180]");
    }
    if (has_genus && !fields[3].empty()) r.genus = fields[3];
    records.push_back(std::move(r));
  }
  return records;
}

void save_trees(const std::vector<TreeRecord>& records,
                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IngestError("cannot write tree file '" + path + "'");
  const bool any_genus =
      std::any_of(records.begin(), records.end(),
                  [](const TreeRecord& r) { return r.genus.has_value(); });
  out << (any_genus ? "tree_id,lat,lon,genus\n" : "tree_id,lat,lon\n");
  char buf[64];
  for (const auto& r : records) {
    out << r.tree_id << ',';
    std::snprintf(buf, sizeof(buf), "%.9f", r.lat);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.9f", r.lon);
    out << buf;
    if (any_genus) {
      out << ',';
      if (r.genus) out << *r.genus;
    }
    out << '\n';
  }
  if (!out) throw IngestError("failed writing tree file '" + path + "'");
}

EmbeddingMatrix load_embeddings(const std::string& path, std::size_t expected_n,
                                EmbeddingKind kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open embedding file '" + path + "'");

  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "EMB1", 4) != 0) {
    throw IngestError("bad magic in '" + path + "' (want EMB1)");
  }
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  if (!in.read(reinterpret_cast<char*>(&n), 4) ||
      !in.read(reinterpret_cast<char*>(&d), 4)) {
    throw IngestError("truncated header in '" + path + "'");
  }
  if (n != expected_n) {
    throw IngestError("embedding row count " + std::to_string(n) +
                      " does not match record count " +
                      std::to_string(expected_n));
  }
  if (d < 2) throw IngestError("embedding dimension must be >= 2, got " +
                               std::to_string(d));

  EmbeddingMatrix m(kind, n, d);
  std::vector<float> row(d);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!in.read(reinterpret_cast<char*>(row.data()),
                 static_cast<std::streamsize>(sizeof(float) * d))) {
      throw IngestError("truncated embedding data at row " + std::to_string(i));
    }
    for (std::uint32_t j = 0; j < d; ++j) {
      if (!std::isfinite(row[j])) {
        throw IngestError("non-finite embedding value at (" +
                          std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      m.at(i, j) = static_cast<double>(row[j]);
    }
  }
  return m;
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IngestError("cannot write embedding file '" + path + "'");
  out.write("EMB1", 4);
  const std::uint32_t n = static_cast<std::uint32_t>(matrix.rows());
  const std::uint32_t d = static_cast<std::uint32_t>(matrix.cols());
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  std::vector<float> row(d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      row[j] = static_cast<float>(matrix.at(i, j));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(float) * d));
  }
  if (!out) throw IngestError("failed writing embedding file '" + path + "'");
}

}  // namespace canopy
