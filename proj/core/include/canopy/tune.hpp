#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "canopy/evaluate.hpp"
#include "canopy/pipeline.hpp"

namespace canopy {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Tuned ranges; integer dimensions are rounded to the nearest integer after
// sampling.
struct SearchSpace {
  ParamRange outlier_frac{0.1, 0.3};
  ParamRange min_cluster_size{2, 10};
  ParamRange min_samples{1, 10};
  ParamRange sim_thresh_merge{0.5, 0.9};
  ParamRange sim_thresh_outliers{0.5, 0.9};
  ParamRange sim_thresh_reassign{0.5, 0.9};
  ParamRange n_iter{0, 6};
};

// Latin hypercube design: each of the 7 dimensions gets exactly one sample
// per stratum, with an independent permutation across configs.
std::vector<PipelineParams> lhs_sample(const SearchSpace& space, int n,
                                       std::uint64_t seed);

// Fraction of occupied cells holding at least one non-noise tree, measured
// before singleton promotion (afterwards it is always 1).
double coverage(std::span<const CellId> cells,
                const ClusterLabels& pre_promotion);

struct LeaderboardRow {
  std::size_t config_index = 0;
  PipelineParams params;
  double v = 0.0;
  double rmse_alpha = 0.0;
  double w1_shannon = 0.0;
  double coverage = 0.0;
  double v_norm = 0.0;
  double rmse_norm = 0.0;
  double s_norm = 0.0;
  double c_norm = 0.0;
  double score = 0.0;
};

struct Leaderboard {
  std::vector<LeaderboardRow> rows;
  std::size_t best_index = 0;

  std::string to_csv() const;
};

// Min-max normalizes the four raw metrics across rows (a constant metric
// normalizes to 1 for every row) and applies
// score = 0.3 V' + 0.3 RMSE' + 0.3 S' + 0.1 C'. Needs >= 2 rows.
void score_leaderboard(std::vector<LeaderboardRow>& rows);

Leaderboard tune(const Pipeline& pipeline, std::span<const int> true_genus,
                 int n, std::uint64_t seed);

struct AblationRow {
  RefineToggles toggles;
  double v = 0.0;
  double rmse_alpha = 0.0;
  double w1_shannon = 0.0;
  double coverage = 0.0;
  double score = 0.0;
};

// All 2^3 toggle combinations of {elim, merge, reassign} on the base config;
// scores are normalized within the 8 rows.
std::vector<AblationRow> ablate(const Pipeline& pipeline,
                                std::span<const int> true_genus,
                                const PipelineParams& base);

std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace canopy
