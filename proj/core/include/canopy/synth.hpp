#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "canopy/diversity.hpp"
#include "canopy/pipeline.hpp"

namespace canopy {

// Synthetic-city generator standing in for the non-public inventory data:
// streets are axis-aligned monoculture rows, genus abundances follow a
// Zipf-like law, visual embeddings are noisy genus directions, and spatial
// embeddings are random Fourier features of the planar position so nearby
// trees have high cosine similarity.
struct SynthConfig {
  int n_genera = 15;
  int n_trees = 5000;
  int n_streets = 40;
  double street_length_m = 1500.0;
  double tree_spacing_mean_m = 12.0;
  double tree_spacing_jitter_m = 3.0;
  double dominance_exponent = 1.0;  // 0 = uniform genus abundances
  int visual_dim = 64;
  double visual_noise_sigma = 0.15;  // noise magnitude, not per-component sd
  double min_genus_angle_deg = 60.0;
  int spatial_dim = 64;
  double spatial_bandwidth_m = 200.0;
  double cell_size_m = 500.0;
  std::uint64_t seed = 42;

  std::string to_json() const;
  static SynthConfig from_json(const std::string& text);
};

struct SynthCity {
  std::vector<TreeRecord> records;  // genus always present
  EmbeddingMatrix visual;
  EmbeddingMatrix spatial;
  GridSpec grid;

  Dataset to_dataset() const;
};

// Unit vectors with pairwise cosine <= cos(min_angle_deg); rejection-sampled,
// errors when the constraint cannot be met within bounded retries.
std::vector<std::vector<double>> genus_directions(int n_genera, int dim,
                                                  double min_angle_deg,
                                                  std::uint64_t seed);

SynthCity generate_city(const SynthConfig& config);

// Brute-force diversity oracle over ground-truth genus labels; an
// independent code path from the diversity module (integer counting,
// rearranged closed forms).
DiversityField oracle_diversity(const std::vector<TreeRecord>& records,
                                const GridSpec& spec);

// Replaces the visual rows of a random `frac` of trees with random unit
// vectors (off-genus noise) for the elimination control study.
void plant_visual_outliers(SynthCity& city, double frac, std::uint64_t seed);

}  // namespace canopy
