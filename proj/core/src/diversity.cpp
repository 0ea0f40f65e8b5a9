#include "canopy/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "canopy/error.hpp"
#include "canopy/hdbscan.hpp"

namespace canopy {

namespace {

void check_counts(std::span<const int> counts) {
  if (counts.empty()) throw InvariantError("empty abundance vector");
  for (int c : counts) {
    if (c <= 0) throw InvariantError("abundance counts must be positive");
  }
}

std::vector<int> cell_counts(const std::map<int, int>& taxa) {
  std::vector<int> counts;
  counts.reserve(taxa.size());
  for (const auto& [taxon, count] : taxa) counts.push_back(count);
  return counts;
}

}  // namespace

std::pair<std::vector<int>, std::vector<std::string>> genus_taxon_ids(
    const std::vector<TreeRecord>& records) {
  std::set<std::string> names;
  for (const auto& r : records) {
    if (!r.genus) {
      throw MissingGenusError("record '" + r.tree_id + "' has no genus label");
    }
    names.insert(*r.genus);
  }
  std::vector<std::string> ordered(names.begin(), names.end());
  std::vector<int> ids;
  ids.reserve(records.size());
  for (const auto& r : records) {
    const auto it = std::lower_bound(ordered.begin(), ordered.end(), *r.genus);
    ids.push_back(static_cast<int>(it - ordered.begin()));
  }
  return {std::move(ids), std::move(ordered)};
}

AbundanceTable abundance(std::span<const CellId> cells,
                         std::span<const int> taxa) {
  if (cells.size() != taxa.size()) {
    throw InvariantError("cells and taxa length mismatch");
  }
  AbundanceTable table;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (taxa[i] == kNoise) {
      throw InvariantError("noise labels must be resolved before abundance");
    }
    ++table[cells[i]][taxa[i]];
  }
  return table;
}

double shannon(std::span<const int> counts) {
  check_counts(counts);
  double total = 0.0;
  for (int c : counts) total += c;
  double h = 0.0;
  for (int c : counts) {
    const double p = c / total;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double simpson(std::span<const int> counts) {
  check_counts(counts);
  double total = 0.0;
  for (int c : counts) total += c;
  double sum_sq = 0.0;
  for (int c : counts) {
    const double p = c / total;
    sum_sq += p * p;
  }
  return std::clamp(1.0 - sum_sq, 0.0, 1.0);
}

int richness(std::span<const int> counts) {
  check_counts(counts);
  return static_cast<int>(counts.size());
}

double pielou(std::span<const int> counts) {
  const int r = richness(counts);
  if (r == 1) return 0.0;
  return shannon(counts) / std::log(static_cast<double>(r));
}

std::vector<double> normalize_field(std::span<const double> values) {
  if (values.empty()) throw InvariantError("cannot normalize an empty field");
  const double max = *std::max_element(values.begin(), values.end());
  if (max <= 0.0) throw InvariantError("cannot normalize an all-zero field");
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v /= max;
  return out;
}

std::pair<double, double> imbalance_stats(const AbundanceTable& table) {
  std::vector<double> ratios;
  for (const auto& [cell, taxa] : table) {
    if (taxa.size() < 2) continue;
    int max = 0;
    int min = 0;
    bool first = true;
    for (const auto& [taxon, count] : taxa) {
      max = first ? count : std::max(max, count);
      min = first ? count : std::min(min, count);
      first = false;
    }
    ratios.push_back(static_cast<double>(max) / static_cast<double>(min));
  }
  if (ratios.empty()) {
    throw InvariantError("no cell holds >= 2 genera; imbalance undefined");
  }
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= static_cast<double>(ratios.size());
  double var = 0.0;
  for (double r : ratios) var += (r - mean) * (r - mean);
  var /= static_cast<double>(ratios.size());
  return {mean, std::sqrt(var)};
}

DiversityField diversity_field(std::span<const CellId> cells,
                               std::span<const int> taxa) {
  const AbundanceTable table = abundance(cells, taxa);
  DiversityField field;
  std::vector<double> shannon_values;
  shannon_values.reserve(table.size());
  for (const auto& [cell, cell_taxa] : table) {
    const auto counts = cell_counts(cell_taxa);
    CellDiversity d;
    d.richness = richness(counts);
    d.shannon = shannon(counts);
    d.simpson = simpson(counts);
    d.evenness = pielou(counts);
    field.cells.emplace(cell, d);
    shannon_values.push_back(d.shannon);
  }
  // An all-monoculture run has max Shannon 0; its normalized field is 0
  // everywhere rather than an error so degenerate configs stay comparable.
  const double max_shannon =
      *std::max_element(shannon_values.begin(), shannon_values.end());
  if (max_shannon > 0.0) {
    const auto normalized = normalize_field(shannon_values);
    std::size_t i = 0;
    for (auto& [cell, d] : field.cells) d.shannon_norm = normalized[i++];
  }
  return field;
}

std::vector<double> DiversityField::values(
    double CellDiversity::* member) const {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& [cell, d] : cells) out.push_back(d.*member);
  return out;
}

std::vector<double> DiversityField::richness_values() const {
  std::vector<double> out;
  out.reserve(cells.size());
  for (const auto& [cell, d] : cells) {
    out.push_back(static_cast<double>(d.richness));
  }
  return out;
}

std::string DiversityField::to_csv() const {
  std::ostringstream out;
  out << "ix,iy,richness,shannon,shannon_norm,simpson,evenness\n";
  char buf[160];
  for (const auto& [cell, d] : cells) {
    std::snprintf(buf, sizeof(buf), "%lld,%lld,%d,%.9g,%.9g,%.9g,%.9g\n",
                  static_cast<long long>(cell.ix),
                  static_cast<long long>(cell.iy), d.richness, d.shannon,
                  d.shannon_norm, d.simpson, d.evenness);
    out << buf;
  }
  return out.str();
}

std::string DiversityField::to_geojson(const GridSpec& spec) const {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& [cell, d] : cells) {
    const double x0 = static_cast<double>(cell.ix) * spec.cell_size_m;
    const double y0 = static_cast<double>(cell.iy) * spec.cell_size_m;
    const double x1 = x0 + spec.cell_size_m;
    const double y1 = y0 + spec.cell_size_m;
    nlohmann::json ring = nlohmann::json::array();
    for (const auto& [x, y] : {std::pair{x0, y0}, std::pair{x1, y0},
                               std::pair{x1, y1}, std::pair{x0, y1},
                               std::pair{x0, y0}}) {
      const auto [lat, lon] = unproject_local(x, y, spec);
      ring.push_back({lon, lat});
    }
    nlohmann::json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "Polygon"},
                           {"coordinates", nlohmann::json::array({ring})}};
    feature["properties"] = {{"ix", cell.ix},
                             {"iy", cell.iy},
                             {"richness", d.richness},
                             {"shannon", d.shannon},
                             {"shannon_norm", d.shannon_norm},
                             {"simpson", d.simpson},
                             {"evenness", d.evenness}};
    features.push_back(feature);
  }
  nlohmann::json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = features;
  return doc.dump(2);
}

}  // namespace canopy
