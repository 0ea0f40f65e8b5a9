#include "canopy/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "canopy/error.hpp"
#include "canopy/rng.hpp"

namespace canopy {

namespace {

double entropy_nats(const std::unordered_map<int, int>& counts, double n) {
  double h = 0.0;
  for (const auto& [key, c] : counts) {
    const double p = c / n;
    h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= n;
  mb /= n;
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return ra == rb ? 1.0 : 0.0;
  return std::clamp(num / std::sqrt(va * vb), -1.0, 1.0);
}

double moran_statistic(std::span<const double> field,
                       const std::vector<std::vector<std::size_t>>& neighbors) {
  const std::size_t n = field.size();
  double mean = 0.0;
  for (double v : field) mean += v;
  mean /= static_cast<double>(n);

  double denom = 0.0;
  for (double v : field) denom += (v - mean) * (v - mean);

  double num = 0.0;
  double sum_w = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (neighbors[i].empty()) continue;
    sum_w += 1.0;  // row-standardized weights sum to 1 per non-isolated cell
    double acc = 0.0;
    for (std::size_t j : neighbors[i]) acc += field[j] - mean;
    num += (field[i] - mean) * acc / static_cast<double>(neighbors[i].size());
  }
  return (static_cast<double>(n) / sum_w) * num / denom;
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty()) {
    throw InvariantError("rmse needs equal non-empty cell sets");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - truth[i];
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(pred.size()));
}

double v_score(std::span<const int> true_taxa,
               std::span<const int> pred_clusters) {
  if (true_taxa.size() != pred_clusters.size() || true_taxa.empty()) {
    throw InvariantError("v_score needs equal non-empty label vectors");
  }
  const double n = static_cast<double>(true_taxa.size());

  std::unordered_map<int, int> c_counts, k_counts;
  std::vector<std::pair<int, int>> joint(true_taxa.size());
  for (std::size_t i = 0; i < true_taxa.size(); ++i) {
    ++c_counts[true_taxa[i]];
    ++k_counts[pred_clusters[i]];
    joint[i] = {true_taxa[i], pred_clusters[i]};
  }
  std::sort(joint.begin(), joint.end());
  double h_joint = 0.0;
  for (std::size_t i = 0; i < joint.size();) {
    std::size_t j = i;
    while (j < joint.size() && joint[j] == joint[i]) ++j;
    const double p = static_cast<double>(j - i) / n;
    h_joint -= p * std::log(p);
    i = j;
  }
  h_joint = std::max(h_joint, 0.0);

  const double h_c = entropy_nats(c_counts, n);
  const double h_k = entropy_nats(k_counts, n);
  const double h_c_given_k = std::max(h_joint - h_k, 0.0);
  const double h_k_given_c = std::max(h_joint - h_c, 0.0);

  const double h = h_c == 0.0 ? 1.0 : std::clamp(1.0 - h_c_given_k / h_c, 0.0, 1.0);
  const double c = h_k == 0.0 ? 1.0 : std::clamp(1.0 - h_k_given_c / h_k, 0.0, 1.0);
  if (h + c == 0.0) return 0.0;
  return 2.0 * h * c / (h + c);
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw InvariantError("wasserstein1 needs non-empty samples");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  if (sa.size() == sb.size()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) acc += std::abs(sa[i] - sb[i]);
    return acc / static_cast<double>(sa.size());
  }

  // Exact area between the two empirical CDFs.
  const double wa = 1.0 / static_cast<double>(sa.size());
  const double wb = 1.0 / static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, acc = 0.0;
  double x = std::min(sa[0], sb[0]);
  while (i < sa.size() || j < sb.size()) {
    double next;
    if (i < sa.size() && (j == sb.size() || sa[i] <= sb[j])) {
      next = sa[i];
    } else {
      next = sb[j];
    }
    acc += std::abs(fa - fb) * (next - x);
    while (i < sa.size() && sa[i] == next) {
      fa += wa;
      ++i;
    }
    while (j < sb.size() && sb[j] == next) {
      fb += wb;
      ++j;
    }
    x = next;
  }
  return acc;
}

std::vector<std::vector<std::size_t>> grid_adjacency(
    std::span<const CellId> cells, Adjacency kind) {
  std::map<CellId, std::size_t> index;
  for (std::size_t i = 0; i < cells.size(); ++i) index.emplace(cells[i], i);
  if (index.size() != cells.size()) {
    throw InvariantError("grid_adjacency expects distinct cells");
  }
  std::vector<std::vector<std::size_t>> neighbors(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        if (dx == 0 && dy == 0) continue;
        if (kind == Adjacency::rook && dx != 0 && dy != 0) continue;
        const auto it =
            index.find(CellId{cells[i].ix + dx, cells[i].iy + dy});
        if (it != index.end()) neighbors[i].push_back(it->second);
      }
    }
  }
  return neighbors;
}

MoranResult morans_i(std::span<const double> field,
                     const std::vector<std::vector<std::size_t>>& neighbors,
                     int n_perm, std::uint64_t seed) {
  const std::size_t n = field.size();
  if (n < 2 || neighbors.size() != n) {
    throw InvariantError("morans_i needs >= 2 cells with adjacency");
  }
  bool any_neighbor = false;
  for (const auto& nb : neighbors) any_neighbor |= !nb.empty();
  if (!any_neighbor) {
    throw InvariantError("morans_i: every cell is isolated");
  }
  const double first = field[0];
  bool constant = true;
  for (double v : field) constant &= (v == first);
  if (constant) throw InvariantError("morans_i: constant field");

  MoranResult result;
  result.i = moran_statistic(field, neighbors);

  if (n_perm > 0) {
    std::vector<double> perm(field.begin(), field.end());
    int greater_or_equal = 0;
    for (int p = 0; p < n_perm; ++p) {
      Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(p));
      rng.shuffle(perm);
      if (moran_statistic(perm, neighbors) >= result.i) ++greater_or_equal;
    }
    result.p_value =
        (1.0 + greater_or_equal) / (static_cast<double>(n_perm) + 1.0);
  } else {
    result.p_value = 1.0;
  }
  return result;
}

MetricCI bootstrap_ci(std::size_t n_cells,
                      const std::function<double(std::span<const std::size_t>)>& metric,
                      int b, double level, std::uint64_t seed) {
  if (n_cells < 2) throw InvariantError("bootstrap needs >= 2 cells");
  if (b < 1) throw InvariantError("bootstrap needs >= 1 replicate");

  MetricCI ci;
  std::vector<std::size_t> identity(n_cells);
  std::iota(identity.begin(), identity.end(), 0);
  ci.point = metric(identity);

  std::vector<double> replicates(static_cast<std::size_t>(b));
  std::vector<std::size_t> idx(n_cells);
  for (int r = 0; r < b; ++r) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r));
    for (std::size_t i = 0; i < n_cells; ++i) {
      idx[i] = static_cast<std::size_t>(rng.uniform_index(n_cells));
    }
    replicates[static_cast<std::size_t>(r)] = metric(idx);
  }
  double mean = 0.0;
  for (double v : replicates) mean += v;
  ci.mean = mean / static_cast<double>(b);

  std::sort(replicates.begin(), replicates.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(b - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, static_cast<std::size_t>(b - 1));
    const double frac = pos - static_cast<double>(lo);
    return replicates[lo] * (1.0 - frac) + replicates[hi] * frac;
  };
  ci.lo = quantile((1.0 - level) / 2.0);
  ci.hi = quantile((1.0 + level) / 2.0);
  return ci;
}

BaselineStats baseline_mean_predictor(std::span<const double> truth) {
  if (truth.empty()) throw InvariantError("baseline needs a non-empty field");
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  const std::vector<double> constant(truth.size(), mean);
  BaselineStats stats;
  stats.rmse_baseline = rmse(constant, truth);
  stats.w1_baseline = wasserstein1(constant, truth);
  return stats;
}

DiagnosticsRecord diagnostics(std::span<const int> true_genus,
                              std::span<const int> pred_clusters,
                              const DiversityField& truth_field,
                              const DiversityField& pred_field) {
  if (true_genus.size() != pred_clusters.size() || true_genus.empty()) {
    throw InvariantError("diagnostics needs aligned non-empty labels");
  }
  const double n = static_cast<double>(true_genus.size());

  std::unordered_map<int, int> genus_totals;
  std::unordered_map<int, std::unordered_map<int, int>> cluster_by_genus;
  std::unordered_map<int, int> cluster_sizes;
  for (std::size_t i = 0; i < true_genus.size(); ++i) {
    ++genus_totals[true_genus[i]];
    ++cluster_by_genus[pred_clusters[i]][true_genus[i]];
    ++cluster_sizes[pred_clusters[i]];
  }

  DiagnosticsRecord rec;
  rec.oversplit_factor = static_cast<double>(cluster_sizes.size()) /
                         static_cast<double>(genus_totals.size());

  double overlap_sum = 0.0;
  std::size_t singletons = 0;
  std::unordered_map<int, int> pred_by_majority_genus;
  for (const auto& [cluster, by_genus] : cluster_by_genus) {
    int best_genus = 0;
    int best = -1;
    for (const auto& [genus, count] : by_genus) {
      if (count > best || (count == best && genus < best_genus)) {
        best = count;
        best_genus = genus;
      }
    }
    overlap_sum += best;
    pred_by_majority_genus[best_genus] += cluster_sizes.at(cluster);
    if (cluster_sizes.at(cluster) == 1) ++singletons;
  }
  rec.purity_micro = overlap_sum / n;
  rec.singleton_ratio =
      static_cast<double>(singletons) / static_cast<double>(cluster_sizes.size());

  // City-level evenness shift.
  auto city_pielou = [](const std::unordered_map<int, int>& counts) {
    std::vector<int> v;
    v.reserve(counts.size());
    for (const auto& [key, c] : counts) v.push_back(c);
    return pielou(v);
  };
  std::unordered_map<int, int> pred_totals;
  for (const auto& [cluster, size] : cluster_sizes) pred_totals[cluster] = size;
  rec.delta_evenness = city_pielou(pred_totals) - city_pielou(genus_totals);

  // Rank-abundance correlation over true genera; genera the prediction never
  // majority-covers count as zero.
  std::vector<int> genera;
  for (const auto& [genus, total] : genus_totals) genera.push_back(genus);
  std::sort(genera.begin(), genera.end());
  std::vector<double> true_ab, pred_ab;
  for (int g : genera) {
    true_ab.push_back(genus_totals.at(g));
    const auto it = pred_by_majority_genus.find(g);
    pred_ab.push_back(it == pred_by_majority_genus.end()
                          ? 0.0
                          : static_cast<double>(it->second));
  }
  rec.rank_abundance_rho = spearman_rho(true_ab, pred_ab);

  // Mean absolute per-cell gaps on the unnormalized indices.
  if (truth_field.cells.size() != pred_field.cells.size()) {
    throw InvariantError("diagnostics: field cell sets differ");
  }
  double sh_gap = 0.0, si_gap = 0.0;
  auto it_p = pred_field.cells.begin();
  for (const auto& [cell, t] : truth_field.cells) {
    if (it_p->first != cell) {
      throw InvariantError("diagnostics: field cell sets differ");
    }
    sh_gap += std::abs(it_p->second.shannon - t.shannon);
    si_gap += std::abs(it_p->second.simpson - t.simpson);
    ++it_p;
  }
  rec.shannon_gap = sh_gap / static_cast<double>(truth_field.cells.size());
  rec.simpson_gap = si_gap / static_cast<double>(truth_field.cells.size());
  return rec;
}

namespace {

MoranResult tolerant_moran(std::span<const double> field,
                           const std::vector<std::vector<std::size_t>>& nb,
                           int n_perm, std::uint64_t seed) {
  try {
    return morans_i(field, nb, n_perm, seed);
  } catch (const InvariantError&) {
    return MoranResult{0.0, 1.0, false};
  }
}

}  // namespace

EvalReport evaluate_city(std::span<const CellId> cells,
                         std::span<const int> true_genus,
                         std::span<const int> pred_clusters,
                         const EvalOptions& options) {
  if (cells.size() != true_genus.size() ||
      cells.size() != pred_clusters.size() || cells.empty()) {
    throw InvariantError("evaluate_city needs aligned non-empty inputs");
  }
  for (int l : pred_clusters) {
    if (l < 0) throw InvariantError("evaluate_city: unresolved noise label");
  }

  const DiversityField truth_field = diversity_field(cells, true_genus);
  const DiversityField pred_field = diversity_field(cells, pred_clusters);

  std::vector<CellId> cell_list;
  cell_list.reserve(truth_field.cells.size());
  for (const auto& [cell, d] : truth_field.cells) cell_list.push_back(cell);
  const std::size_t n_cells = cell_list.size();

  const auto true_rich = truth_field.richness_values();
  const auto pred_rich = pred_field.richness_values();
  const auto true_sh = truth_field.values(&CellDiversity::shannon);
  const auto pred_sh = pred_field.values(&CellDiversity::shannon);
  const auto true_sh_norm = truth_field.values(&CellDiversity::shannon_norm);
  const auto pred_sh_norm = pred_field.values(&CellDiversity::shannon_norm);
  const auto true_simp = truth_field.values(&CellDiversity::simpson);
  const auto pred_simp = pred_field.values(&CellDiversity::simpson);

  // Trees per cell, in cell order, for label-level bootstrap metrics.
  std::map<CellId, std::size_t> cell_index;
  for (std::size_t i = 0; i < n_cells; ++i) cell_index.emplace(cell_list[i], i);
  std::vector<std::vector<std::size_t>> trees_in_cell(n_cells);
  for (std::size_t t = 0; t < cells.size(); ++t) {
    trees_in_cell[cell_index.at(cells[t])].push_back(t);
  }

  auto gather = [](const std::vector<double>& values,
                   std::span<const std::size_t> idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(values[i]);
    return out;
  };

  EvalReport report;
  report.rmse_alpha = bootstrap_ci(
      n_cells,
      [&](std::span<const std::size_t> idx) {
        return rmse(gather(pred_rich, idx), gather(true_rich, idx));
      },
      options.bootstrap_b, options.level, options.seed);

  report.v = bootstrap_ci(
      n_cells,
      [&](std::span<const std::size_t> idx) {
        std::vector<int> t, p;
        for (std::size_t c : idx) {
          for (std::size_t tree : trees_in_cell[c]) {
            t.push_back(true_genus[tree]);
            p.push_back(pred_clusters[tree]);
          }
        }
        return v_score(t, p);
      },
      options.bootstrap_b, options.level, options.seed + 1);

  report.w1_shannon = bootstrap_ci(
      n_cells,
      [&](std::span<const std::size_t> idx) {
        return wasserstein1(gather(pred_sh_norm, idx), gather(true_sh_norm, idx));
      },
      options.bootstrap_b, options.level, options.seed + 2);

  report.w1_simpson = bootstrap_ci(
      n_cells,
      [&](std::span<const std::size_t> idx) {
        return wasserstein1(gather(pred_simp, idx), gather(true_simp, idx));
      },
      options.bootstrap_b, options.level, options.seed + 3);

  // Shared-maximum normalization variant (point estimate only).
  {
    const double shared_max =
        std::max(*std::max_element(true_sh.begin(), true_sh.end()),
                 *std::max_element(pred_sh.begin(), pred_sh.end()));
    if (shared_max > 0.0) {
      std::vector<double> a(pred_sh), b(true_sh);
      for (double& v : a) v /= shared_max;
      for (double& v : b) v /= shared_max;
      report.w1_shannon_shared_max = wasserstein1(a, b);
    }
  }

  const auto adjacency = grid_adjacency(cell_list, Adjacency::queen);
  report.moran_pred.richness =
      tolerant_moran(pred_rich, adjacency, options.n_perm, options.seed + 10);
  report.moran_pred.shannon =
      tolerant_moran(pred_sh, adjacency, options.n_perm, options.seed + 11);
  report.moran_pred.simpson =
      tolerant_moran(pred_simp, adjacency, options.n_perm, options.seed + 12);
  report.moran_truth.richness =
      tolerant_moran(true_rich, adjacency, options.n_perm, options.seed + 13);
  report.moran_truth.shannon =
      tolerant_moran(true_sh, adjacency, options.n_perm, options.seed + 14);
  report.moran_truth.simpson =
      tolerant_moran(true_simp, adjacency, options.n_perm, options.seed + 15);

  const auto base_rich = baseline_mean_predictor(true_rich);
  const auto base_sh = baseline_mean_predictor(true_sh_norm);
  const auto base_simp = baseline_mean_predictor(true_simp);
  report.truth_richness_sd = base_rich.rmse_baseline;
  report.rmse_baseline = base_rich.rmse_baseline;
  report.w1_baseline_shannon = base_sh.w1_baseline;
  report.w1_baseline_simpson = base_simp.w1_baseline;

  if (report.truth_richness_sd > 0.0) {
    report.nrmse = report.rmse_alpha.point / report.truth_richness_sd;
    report.delta_nrmse_vs_baseline = 1.0 - report.nrmse;
  }
  if (report.w1_baseline_shannon > 0.0) {
    report.improvement_w1_shannon_pct =
        100.0 * (report.w1_baseline_shannon - report.w1_shannon.point) /
        report.w1_baseline_shannon;
  }
  if (report.w1_baseline_simpson > 0.0) {
    report.improvement_w1_simpson_pct =
        100.0 * (report.w1_baseline_simpson - report.w1_simpson.point) /
        report.w1_baseline_simpson;
  }

  report.diag = diagnostics(true_genus, pred_clusters, truth_field, pred_field);
  return report;
}

namespace {

// Cluster-truth agreement of the assignments surviving the last elimination
// pass; eliminated records are out of scope for the comparison.
double post_elimination_v(std::span<const int> true_genus,
                          const ClusterLabels& snapshot) {
  std::vector<int> kept_truth, kept_pred;
  for (std::size_t i = 0; i < snapshot.labels.size(); ++i) {
    if (snapshot.labels[i] != kNoise) {
      kept_truth.push_back(true_genus[i]);
      kept_pred.push_back(snapshot.labels[i]);
    }
  }
  return v_score(kept_truth, kept_pred);
}

}  // namespace

EliminationControl random_elimination_control(const Pipeline& pipeline,
                                              std::span<const int> true_genus,
                                              const PipelineParams& params,
                                              std::uint64_t seed,
                                              int n_trials) {
  if (n_trials < 1) throw InvariantError("need >= 1 random trial");
  if (true_genus.size() != pipeline.dataset().records.size()) {
    throw InvariantError("genus labels misaligned with dataset");
  }
  EliminationControl control;
  const auto sim_run = pipeline.run(params);
  control.v_similarity =
      post_elimination_v(true_genus, sim_run.post_last_elimination);

  for (int t = 0; t < n_trials; ++t) {
    const std::uint64_t trial_seed =
        Rng::substream(seed, static_cast<std::uint64_t>(t)).next_u64();
    const auto run = pipeline.run_random_elimination(params, trial_seed);
    control.v_random.push_back(
        post_elimination_v(true_genus, run.post_last_elimination));
  }
  double mean = 0.0;
  for (double v : control.v_random) mean += v;
  mean /= static_cast<double>(n_trials);
  double var = 0.0;
  for (double v : control.v_random) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n_trials);
  control.v_random_mean = mean;
  control.v_random_sd = std::sqrt(var);
  return control;
}

namespace {

nlohmann::json ci_json(const MetricCI& ci) {
  return {{"point", ci.point}, {"mean", ci.mean}, {"ci_low", ci.lo},
          {"ci_high", ci.hi}};
}

nlohmann::json moran_json(const MoranResult& m) {
  return {{"i", m.i}, {"p_value", m.p_value}, {"defined", m.defined}};
}

}  // namespace

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["metrics"] = {{"rmse_alpha", ci_json(rmse_alpha)},
                  {"v_score", ci_json(v)},
                  {"w1_shannon", ci_json(w1_shannon)},
                  {"w1_simpson", ci_json(w1_simpson)}};
  j["metrics"]["w1_shannon_shared_max"] = w1_shannon_shared_max;
  j["moran"] = {
      {"pred",
       {{"richness", moran_json(moran_pred.richness)},
        {"shannon", moran_json(moran_pred.shannon)},
        {"simpson", moran_json(moran_pred.simpson)}}},
      {"truth",
       {{"richness", moran_json(moran_truth.richness)},
        {"shannon", moran_json(moran_truth.shannon)},
        {"simpson", moran_json(moran_truth.simpson)}}}};
  j["baselines"] = {{"truth_richness_sd", truth_richness_sd},
                    {"rmse_baseline", rmse_baseline},
                    {"w1_baseline_shannon", w1_baseline_shannon},
                    {"w1_baseline_simpson", w1_baseline_simpson}};
  j["derived"] = {{"nrmse", nrmse},
                  {"delta_nrmse_vs_baseline", delta_nrmse_vs_baseline},
                  {"improvement_w1_shannon_pct", improvement_w1_shannon_pct},
                  {"improvement_w1_simpson_pct", improvement_w1_simpson_pct}};
  j["diagnostics"] = {{"definitions", "reconstructed"},
                      {"oversplit_factor", diag.oversplit_factor},
                      {"purity_micro", diag.purity_micro},
                      {"delta_evenness", diag.delta_evenness},
                      {"rank_abundance_rho", diag.rank_abundance_rho},
                      {"shannon_gap", diag.shannon_gap},
                      {"simpson_gap", diag.simpson_gap},
                      {"singleton_ratio", diag.singleton_ratio}};
  return j.dump(2);
}

std::string EvalReport::csv_header() {
  return "name,rmse_alpha,rmse_ci_low,rmse_ci_high,v_score,v_ci_low,v_ci_high,"
         "w1_shannon,w1_shannon_ci_low,w1_shannon_ci_high,w1_simpson,"
         "w1_simpson_ci_low,w1_simpson_ci_high,moran_pred_shannon,"
         "moran_truth_shannon,nrmse,oversplit_factor,purity_micro,"
         "delta_evenness,rank_abundance_rho,singleton_ratio";
}

std::string EvalReport::to_csv_row(const std::string& name) const {
  char buf[640];
  std::snprintf(
      buf, sizeof(buf),
      "%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,"
      "%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g",
      name.c_str(), rmse_alpha.mean, rmse_alpha.lo, rmse_alpha.hi, v.mean,
      v.lo, v.hi, w1_shannon.mean, w1_shannon.lo, w1_shannon.hi,
      w1_simpson.mean, w1_simpson.lo, w1_simpson.hi, moran_pred.shannon.i,
      moran_truth.shannon.i, nrmse, diag.oversplit_factor, diag.purity_micro,
      diag.delta_evenness, diag.rank_abundance_rho, diag.singleton_ratio);
  return buf;
}

}  // namespace canopy
