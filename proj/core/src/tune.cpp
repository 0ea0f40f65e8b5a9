#include "canopy/tune.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

#include "canopy/diversity.hpp"
#include "canopy/error.hpp"
#include "canopy/rng.hpp"

namespace canopy {

namespace {

// Dimension order is fixed so a seed pins the whole design.
enum Dim {
  kOutlierFrac = 0,
  kMinClusterSize,
  kMinSamples,
  kSimMerge,
  kSimOutliers,
  kSimReassign,
  kNIter,
  kNumDims
};

ParamRange range_of(const SearchSpace& space, int dim) {
  switch (dim) {
    case kOutlierFrac: return space.outlier_frac;
    case kMinClusterSize: return space.min_cluster_size;
    case kMinSamples: return space.min_samples;
    case kSimMerge: return space.sim_thresh_merge;
    case kSimOutliers: return space.sim_thresh_outliers;
    case kSimReassign: return space.sim_thresh_reassign;
    default: return space.n_iter;
  }
}

struct QuickMetrics {
  double v = 0.0;
  double rmse_alpha = 0.0;
  double w1_shannon = 0.0;
  double coverage = 0.0;
};

QuickMetrics quick_metrics(std::span<const CellId> cells,
                           std::span<const int> true_genus,
                           const PipelineResult& result) {
  QuickMetrics m;
  m.v = v_score(true_genus, result.labels.labels);
  const DiversityField truth = diversity_field(cells, true_genus);
  const DiversityField pred = diversity_field(cells, result.labels.labels);
  m.rmse_alpha = rmse(pred.richness_values(), truth.richness_values());
  m.w1_shannon = wasserstein1(pred.values(&CellDiversity::shannon_norm),
                              truth.values(&CellDiversity::shannon_norm));
  m.coverage = coverage(cells, result.pre_promotion);
  return m;
}

void minmax_normalize(std::vector<double>& values, bool invert) {
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) {
    std::fill(values.begin(), values.end(), 1.0);
    return;
  }
  for (double& v : values) {
    v = (v - lo) / (hi - lo);
    if (invert) v = 1.0 - v;
  }
}

}  // namespace

std::vector<PipelineParams> lhs_sample(const SearchSpace& space, int n,
                                       std::uint64_t seed) {
  if (n < 1) throw InvariantError("lhs_sample needs n >= 1");
  Rng rng(seed);
  const std::size_t count = static_cast<std::size_t>(n);

  std::vector<std::vector<double>> samples(kNumDims,
                                           std::vector<double>(count, 0.0));
  for (int dim = 0; dim < kNumDims; ++dim) {
    const ParamRange r = range_of(space, dim);
    std::vector<double> strata(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double u = (static_cast<double>(j) + rng.uniform()) /
                       static_cast<double>(count);
      strata[j] = r.lo + u * (r.hi - r.lo);
    }
    std::vector<std::size_t> perm(count);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (std::size_t k = 0; k < count; ++k) samples[dim][k] = strata[perm[k]];
  }

  std::vector<PipelineParams> configs(count);
  for (std::size_t k = 0; k < count; ++k) {
    PipelineParams p;
    p.refine.outlier_frac = samples[kOutlierFrac][k];
    p.min_cluster_size =
        static_cast<int>(std::llround(samples[kMinClusterSize][k]));
    p.min_samples = static_cast<int>(std::llround(samples[kMinSamples][k]));
    p.refine.sim_thresh_merge = samples[kSimMerge][k];
    p.refine.sim_thresh_outliers = samples[kSimOutliers][k];
    p.refine.sim_thresh_reassign = samples[kSimReassign][k];
    p.refine.n_iter = static_cast<int>(std::llround(samples[kNIter][k]));
    configs[k] = p;
  }
  return configs;
}

double coverage(std::span<const CellId> cells,
                const ClusterLabels& pre_promotion) {
  if (cells.size() != pre_promotion.labels.size()) {
    throw InvariantError("coverage: cells and labels misaligned");
  }
  std::set<CellId> occupied;
  std::set<CellId> covered;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    occupied.insert(cells[i]);
    if (pre_promotion.labels[i] != kNoise) covered.insert(cells[i]);
  }
  if (occupied.empty()) return 0.0;
  return static_cast<double>(covered.size()) /
         static_cast<double>(occupied.size());
}

void score_leaderboard(std::vector<LeaderboardRow>& rows) {
  if (rows.size() < 2) {
    throw InvariantError("scoring needs >= 2 configs for normalization");
  }
  std::vector<double> v, r, s, c;
  for (const auto& row : rows) {
    v.push_back(row.v);
    r.push_back(row.rmse_alpha);
    s.push_back(row.w1_shannon);
    c.push_back(row.coverage);
  }
  minmax_normalize(v, false);
  minmax_normalize(r, true);  // lower raw RMSE is better
  minmax_normalize(s, true);  // lower raw W1 is better
  minmax_normalize(c, false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].v_norm = v[i];
    rows[i].rmse_norm = r[i];
    rows[i].s_norm = s[i];
    rows[i].c_norm = c[i];
    rows[i].score = 0.3 * v[i] + 0.3 * r[i] + 0.3 * s[i] + 0.1 * c[i];
  }
}

Leaderboard tune(const Pipeline& pipeline, std::span<const int> true_genus,
                 int n, std::uint64_t seed) {
  const auto configs = lhs_sample(SearchSpace{}, n, seed);
  Leaderboard board;
  board.rows.reserve(configs.size());
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const auto result = pipeline.run(configs[k]);
    const auto m =
        quick_metrics(pipeline.dataset().cells, true_genus, result);
    LeaderboardRow row;
    row.config_index = k;
    row.params = configs[k];
    row.v = m.v;
    row.rmse_alpha = m.rmse_alpha;
    row.w1_shannon = m.w1_shannon;
    row.coverage = m.coverage;
    board.rows.push_back(row);
  }
  score_leaderboard(board.rows);
  board.best_index = 0;
  for (std::size_t k = 1; k < board.rows.size(); ++k) {
    if (board.rows[k].score > board.rows[board.best_index].score) {
      board.best_index = k;
    }
  }
  return board;
}

std::vector<AblationRow> ablate(const Pipeline& pipeline,
                                std::span<const int> true_genus,
                                const PipelineParams& base) {
  std::vector<AblationRow> rows;
  std::vector<LeaderboardRow> scored;
  for (int bits = 7; bits >= 0; --bits) {
    PipelineParams p = base;
    p.refine.toggles.elim = (bits & 4) != 0;
    p.refine.toggles.merge = (bits & 2) != 0;
    p.refine.toggles.reassign = (bits & 1) != 0;
    const auto result = pipeline.run(p);
    const auto m =
        quick_metrics(pipeline.dataset().cells, true_genus, result);
    AblationRow row;
    row.toggles = p.refine.toggles;
    row.v = m.v;
    row.rmse_alpha = m.rmse_alpha;
    row.w1_shannon = m.w1_shannon;
    row.coverage = m.coverage;
    rows.push_back(row);

    LeaderboardRow lr;
    lr.v = m.v;
    lr.rmse_alpha = m.rmse_alpha;
    lr.w1_shannon = m.w1_shannon;
    lr.coverage = m.coverage;
    scored.push_back(lr);
  }
  score_leaderboard(scored);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].score = scored[i].score;
  return rows;
}

std::string Leaderboard::to_csv() const {
  std::ostringstream out;
  out << "config,outlier_frac,min_cluster_size,min_samples,sim_thresh_merge,"
         "sim_thresh_outliers,sim_thresh_reassign,n_iter,v_score,rmse_alpha,"
         "w1_shannon,coverage,v_norm,rmse_norm,s_norm,c_norm,score\n";
  char buf[512];
  for (const auto& row : rows) {
    std::snprintf(
        buf, sizeof(buf),
        "%zu,%.6g,%d,%d,%.6g,%.6g,%.6g,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,"
        "%.6g,%.6g\n",
        row.config_index, row.params.refine.outlier_frac,
        row.params.min_cluster_size, row.params.min_samples,
        row.params.refine.sim_thresh_merge,
        row.params.refine.sim_thresh_outliers,
        row.params.refine.sim_thresh_reassign, row.params.refine.n_iter, row.v,
        row.rmse_alpha, row.w1_shannon, row.coverage, row.v_norm, row.rmse_norm,
        row.s_norm, row.c_norm, row.score);
    out << buf;
  }
  return out.str();
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "elim,merge,reassign,v_score,rmse_alpha,w1_shannon,coverage,score\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.6g,%.6g,%.6g,%.6g,%.6g\n",
                  row.toggles.elim ? 1 : 0, row.toggles.merge ? 1 : 0,
                  row.toggles.reassign ? 1 : 0, row.v, row.rmse_alpha,
                  row.w1_shannon, row.coverage, row.score);
    out << buf;
  }
  return out.str();
}

}  // namespace canopy
