#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "canopy/corpus.hpp"

namespace canopy {

// Per-cell taxon counts; taxa are cluster ids for predictions or dense genus
// ids for ground truth. Cells without trees never appear.
using AbundanceTable = std::map<CellId, std::map<int, int>>;

struct CellDiversity {
  int richness = 0;
  double shannon = 0.0;       // nats
  double shannon_norm = 0.0;  // shannon / max over the run's cells; 0 if max is 0
  double simpson = 0.0;
  double evenness = 0.0;  // Pielou; 0 by convention at richness 1
};

struct DiversityField {
  std::map<CellId, CellDiversity> cells;

  std::vector<double> values(double CellDiversity::* member) const;
  std::vector<double> richness_values() const;

  std::string to_csv() const;
  std::string to_geojson(const GridSpec& spec) const;
};

// Dense ids for ground-truth genus labels, sorted by name. Errors if any
// record lacks a genus.
std::pair<std::vector<int>, std::vector<std::string>> genus_taxon_ids(
    const std::vector<TreeRecord>& records);

AbundanceTable abundance(std::span<const CellId> cells,
                         std::span<const int> taxa);

double shannon(std::span<const int> counts);
double simpson(std::span<const int> counts);
int richness(std::span<const int> counts);
double pielou(std::span<const int> counts);

// Divides by the maximum over cells; errors when the field is all zero.
std::vector<double> normalize_field(std::span<const double> values);

// Mean and population SD of the per-cell max/min genus count ratio over
// cells holding >= 2 genera.
std::pair<double, double> imbalance_stats(const AbundanceTable& table);

DiversityField diversity_field(std::span<const CellId> cells,
                               std::span<const int> taxa);

}  // namespace canopy
