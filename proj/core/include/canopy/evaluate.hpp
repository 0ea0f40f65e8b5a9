#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "canopy/diversity.hpp"
#include "canopy/pipeline.hpp"

namespace canopy {

struct MetricCI {
  double point = 0.0;  // full-sample estimate
  double mean = 0.0;   // mean of bootstrap replicates
  double lo = 0.0;
  double hi = 0.0;
};

enum class Adjacency { queen, rook };

struct MoranResult {
  double i = 0.0;
  double p_value = 1.0;  // one-sided (greater), permutation, +1 smoothed
  bool defined = true;   // false when the field was degenerate for Moran's I
};

double rmse(std::span<const double> pred, std::span<const double> truth);

// V-measure: harmonic mean of homogeneity and completeness, natural-log
// entropies. h = 1 when H(C) = 0, c = 1 when H(K) = 0, V = 0 when h + c = 0.
double v_score(std::span<const int> true_taxa, std::span<const int> pred_clusters);

// Exact 1-Wasserstein distance between two empirical distributions
// (unweighted samples, possibly different sizes).
double wasserstein1(std::span<const double> a, std::span<const double> b);

// Neighbor lists over the occupied cells (index-aligned with `cells`).
std::vector<std::vector<std::size_t>> grid_adjacency(
    std::span<const CellId> cells, Adjacency kind);

// Row-standardized Moran's I with permutation inference. Errors on a
// constant field or when no cell has a neighbor. n_perm = 0 skips the test
// (p = 1).
MoranResult morans_i(std::span<const double> field,
                     const std::vector<std::vector<std::size_t>>& neighbors,
                     int n_perm, std::uint64_t seed);

// Percentile bootstrap over cells. The metric sees resampled cell indices.
MetricCI bootstrap_ci(std::size_t n_cells,
                      const std::function<double(std::span<const std::size_t>)>& metric,
                      int b = 1000, double level = 0.95,
                      std::uint64_t seed = 42);

struct BaselineStats {
  double rmse_baseline = 0.0;  // equals the population SD of the truth
  double w1_baseline = 0.0;    // mean absolute deviation from the mean
};

BaselineStats baseline_mean_predictor(std::span<const double> truth);

// Reconstructed inflation diagnostics; definitions are flagged as such in
// the serialized report.
struct DiagnosticsRecord {
  double oversplit_factor = 0.0;
  double purity_micro = 0.0;
  double delta_evenness = 0.0;
  double rank_abundance_rho = 0.0;
  double shannon_gap = 0.0;
  double simpson_gap = 0.0;
  double singleton_ratio = 0.0;
};

DiagnosticsRecord diagnostics(std::span<const int> true_genus,
                              std::span<const int> pred_clusters,
                              const DiversityField& truth_field,
                              const DiversityField& pred_field);

struct EvalOptions {
  int n_perm = 999;
  int bootstrap_b = 1000;
  double level = 0.95;
  std::uint64_t seed = 42;
};

struct MoranTriple {
  MoranResult richness;
  MoranResult shannon;
  MoranResult simpson;
};

struct EvalReport {
  MetricCI rmse_alpha;
  MetricCI v;
  MetricCI w1_shannon;  // normalized-Shannon distributions, per-field maxima
  MetricCI w1_simpson;
  double w1_shannon_shared_max = 0.0;  // shared-maximum normalization variant

  MoranTriple moran_pred;
  MoranTriple moran_truth;

  double truth_richness_sd = 0.0;
  double rmse_baseline = 0.0;
  double w1_baseline_shannon = 0.0;
  double w1_baseline_simpson = 0.0;
  double nrmse = 0.0;                   // rmse / sd
  double delta_nrmse_vs_baseline = 0.0; // 1 - nrmse
  double improvement_w1_shannon_pct = 0.0;
  double improvement_w1_simpson_pct = 0.0;

  DiagnosticsRecord diag;

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row(const std::string& name) const;
};

// Full metric suite for one city: pred_clusters must be promotion-complete
// (no noise labels).
EvalReport evaluate_city(std::span<const CellId> cells,
                         std::span<const int> true_genus,
                         std::span<const int> pred_clusters,
                         const EvalOptions& options);

struct EliminationControl {
  double v_similarity = 0.0;
  double v_random_mean = 0.0;
  double v_random_sd = 0.0;
  std::vector<double> v_random;
};

// Similarity-guided elimination vs n_trials random-elimination runs of the
// same per-cluster size; V-scores of the final labels against genus truth.
EliminationControl random_elimination_control(const Pipeline& pipeline,
                                              std::span<const int> true_genus,
                                              const PipelineParams& params,
                                              std::uint64_t seed, int n_trials);

}  // namespace canopy
