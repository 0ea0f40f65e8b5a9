#include "canopy/refine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <nlohmann/json.hpp>

#include "canopy/error.hpp"
#include "canopy/rng.hpp"

namespace canopy {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

std::vector<std::size_t> noise_pool(const ClusterLabels& labels) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i] == kNoise) pool.push_back(i);
  }
  return pool;
}

EliminationResult eliminate_by_count(
    const ClusterLabels& labels, double outlier_frac,
    const std::function<std::vector<std::size_t>(
        const std::vector<std::size_t>&, std::size_t)>& pick) {
  if (outlier_frac < 0.0 || outlier_frac > 1.0) {
    throw InvariantError("outlier_frac must be in [0, 1]");
  }
  EliminationResult result;
  result.labels = labels;
  if (outlier_frac == 0.0) return result;

  const auto members = cluster_members(labels);
  for (const auto& m : members) {
    if (m.size() < 3) continue;
    const std::size_t count = static_cast<std::size_t>(
        std::floor(outlier_frac * static_cast<double>(m.size())));
    if (count == 0) continue;
    for (std::size_t idx : pick(m, count)) {
      result.labels.labels[idx] = kNoise;
      result.eliminated.push_back(idx);
    }
  }
  std::sort(result.eliminated.begin(), result.eliminated.end());
  result.labels = canonicalize_labels(result.labels.labels);
  return result;
}

}  // namespace

EliminationResult eliminate_outliers(const ClusterLabels& labels,
                                     const EmbeddingMatrix& visual_unit,
                                     double outlier_frac) {
  return eliminate_by_count(
      labels, outlier_frac,
      [&](const std::vector<std::size_t>& m, std::size_t count) {
        const auto sims = mean_intra_similarity(visual_unit, m);
        std::vector<std::size_t> order(m.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          if (sims[a] != sims[b]) return sims[a] < sims[b];
          return m[a] < m[b];
        });
        std::vector<std::size_t> out;
        out.reserve(count);
        for (std::size_t k = 0; k < count; ++k) out.push_back(m[order[k]]);
        return out;
      });
}

EliminationResult eliminate_random(const ClusterLabels& labels,
                                   double outlier_frac, std::uint64_t seed) {
  Rng rng(seed);
  return eliminate_by_count(
      labels, outlier_frac,
      [&rng](const std::vector<std::size_t>& m, std::size_t count) {
        std::vector<std::size_t> pool = m;
        rng.shuffle(pool);
        pool.resize(count);
        return pool;
      });
}

ClusterLabels merge_clusters(const ClusterLabels& labels,
                             const EmbeddingMatrix& visual_unit,
                             double sim_thresh_merge,
                             std::size_t* merges_out) {
  const auto members = cluster_members(labels);
  const std::size_t k = members.size();
  const std::size_t d = visual_unit.cols();

  // Unnormalized direction sums; centroid similarity is the cosine of sums.
  std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
  std::vector<char> active(k, 1);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t idx : members[c]) {
      const auto row = visual_unit.row(idx);
      for (std::size_t j = 0; j < d; ++j) sums[c][j] += row[j];
    }
  }

  auto centroid_cos = [&](std::size_t a, std::size_t b) {
    const double na = std::sqrt(dot(sums[a], sums[a]));
    const double nb = std::sqrt(dot(sums[b], sums[b]));
    if (na < 1e-12 || nb < 1e-12) {
      throw InvariantError("centroid direction vanished during merging");
    }
    return std::clamp(dot(sums[a], sums[b]) / (na * nb), -1.0, 1.0);
  };

  std::vector<double> sim(k * k, -2.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      sim[a * k + b] = centroid_cos(a, b);
    }
  }

  // union target per retired id so member rebuilding stays O(n).
  std::vector<std::size_t> merged_into(k);
  std::iota(merged_into.begin(), merged_into.end(), 0);
  std::size_t merges = 0;

  while (true) {
    double best = sim_thresh_merge;  // strict > required
    std::size_t best_a = k, best_b = k;
    for (std::size_t a = 0; a < k; ++a) {
      if (!active[a]) continue;
      for (std::size_t b = a + 1; b < k; ++b) {
        if (!active[b]) continue;
        if (sim[a * k + b] > best) {
          best = sim[a * k + b];
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a == k) break;

    for (std::size_t j = 0; j < d; ++j) sums[best_a][j] += sums[best_b][j];
    active[best_b] = 0;
    merged_into[best_b] = best_a;
    ++merges;
    for (std::size_t c = 0; c < k; ++c) {
      if (!active[c] || c == best_a) continue;
      const double s = centroid_cos(std::min(c, best_a), std::max(c, best_a));
      sim[std::min(c, best_a) * k + std::max(c, best_a)] = s;
    }
  }

  auto resolve = [&](std::size_t c) {
    while (merged_into[c] != c) c = merged_into[c];
    return c;
  };
  std::vector<int> raw(labels.labels.size(), kNoise);
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    if (labels.labels[i] != kNoise) {
      raw[i] = static_cast<int>(
          resolve(static_cast<std::size_t>(labels.labels[i])));
    }
  }
  if (merges_out) *merges_out = merges;
  return canonicalize_labels(raw);
}

GroupingResult group_outliers(const ClusterLabels& labels,
                              const EmbeddingMatrix& visual_unit,
                              double sim_thresh_outliers,
                              OutlierGrouping mode) {
  GroupingResult result;
  result.labels = labels;
  const auto pool = noise_pool(labels);
  const std::size_t m = pool.size();
  if (m < 2) return result;

  std::vector<std::vector<std::size_t>> groups;
  if (mode == OutlierGrouping::components) {
    std::vector<std::size_t> comp(m);
    std::iota(comp.begin(), comp.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      while (comp[x] != x) {
        comp[x] = comp[comp[x]];
        x = comp[x];
      }
      return x;
    };
    for (std::size_t a = 0; a < m; ++a) {
      const auto ra = visual_unit.row(pool[a]);
      for (std::size_t b = a + 1; b < m; ++b) {
        const double s = std::clamp(dot(ra, visual_unit.row(pool[b])), -1.0, 1.0);
        if (s > sim_thresh_outliers) comp[find(a)] = find(b);
      }
    }
    std::vector<std::vector<std::size_t>> by_root(m);
    for (std::size_t a = 0; a < m; ++a) by_root[find(a)].push_back(pool[a]);
    for (auto& g : by_root) {
      if (g.size() >= 2) groups.push_back(std::move(g));
    }
  } else {
    // Complete linkage: greedily merge the pair of groups whose weakest
    // cross-pair similarity is highest and still above threshold.
    std::vector<std::vector<std::size_t>> gs;
    gs.reserve(m);
    for (std::size_t a = 0; a < m; ++a) gs.push_back({pool[a]});
    auto linkage = [&](const std::vector<std::size_t>& ga,
                       const std::vector<std::size_t>& gb) {
      double weakest = 2.0;
      for (std::size_t x : ga) {
        for (std::size_t y : gb) {
          weakest = std::min(
              weakest, std::clamp(dot(visual_unit.row(x), visual_unit.row(y)),
                                  -1.0, 1.0));
        }
      }
      return weakest;
    };
    while (gs.size() > 1) {
      double best = sim_thresh_outliers;
      std::size_t ba = gs.size(), bb = gs.size();
      for (std::size_t a = 0; a < gs.size(); ++a) {
        for (std::size_t b = a + 1; b < gs.size(); ++b) {
          const double s = linkage(gs[a], gs[b]);
          if (s > best) {
            best = s;
            ba = a;
            bb = b;
          }
        }
      }
      if (ba == gs.size()) break;
      gs[ba].insert(gs[ba].end(), gs[bb].begin(), gs[bb].end());
      std::sort(gs[ba].begin(), gs[ba].end());
      gs.erase(gs.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    for (auto& g : gs) {
      if (g.size() >= 2) groups.push_back(std::move(g));
    }
  }

  // Deterministic id order: new clusters sorted by smallest member index.
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  int next_id = result.labels.num_clusters;
  for (const auto& g : groups) {
    for (std::size_t idx : g) result.labels.labels[idx] = next_id;
    ++next_id;
    result.grouped += g.size();
    result.new_clusters += 1;
  }
  result.labels = canonicalize_labels(result.labels.labels);
  return result;
}

ClusterLabels reassign_outliers(const ClusterLabels& labels,
                                const EmbeddingMatrix& visual_unit,
                                double sim_thresh_reassign,
                                std::size_t* reassigned_out) {
  const auto pool = noise_pool(labels);
  ClusterLabels out = labels;
  std::size_t reassigned = 0;
  if (!pool.empty() && labels.num_clusters > 0) {
    const auto members = cluster_members(labels);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(members.size());
    for (const auto& m : members) centroids.push_back(centroid(visual_unit, m));
    for (std::size_t idx : pool) {
      const auto row = visual_unit.row(idx);
      double best = -2.0;
      std::size_t best_c = members.size();
      for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double s = std::clamp(dot(row, centroids[c]), -1.0, 1.0);
        if (s > best) {
          best = s;
          best_c = c;
        }
      }
      if (best_c < members.size() && best > sim_thresh_reassign) {
        out.labels[idx] = static_cast<int>(best_c);
        ++reassigned;
      }
    }
  }
  if (reassigned_out) *reassigned_out = reassigned;
  return canonicalize_labels(out.labels);
}

ClusterLabels promote_singletons(const ClusterLabels& labels,
                                 std::size_t* promoted_out) {
  ClusterLabels out = labels;
  int next_id = out.num_clusters;
  std::size_t promoted = 0;
  for (int& l : out.labels) {
    if (l == kNoise) {
      l = next_id++;
      ++promoted;
    }
  }
  if (promoted_out) *promoted_out = promoted;
  return canonicalize_labels(out.labels);
}

namespace {

RefineResult run_refine(const ClusterLabels& initial,
                        const EmbeddingMatrix& visual_unit,
                        const RefineParams& params, bool random_elim,
                        std::uint64_t seed) {
  if (initial.labels.size() != visual_unit.rows()) {
    throw InvariantError("labels and visual embeddings are misaligned");
  }
  if (params.n_iter < 0) throw InvariantError("n_iter must be >= 0");

  RefineResult result;
  result.labels = canonicalize_labels(initial.labels);
  result.post_last_elimination = result.labels;
  for (int iter = 0; iter < params.n_iter; ++iter) {
    RefineIterationCounts counts;
    if (params.toggles.elim) {
      auto elim = random_elim
                      ? eliminate_random(result.labels, params.outlier_frac,
                                         Rng::substream(seed, iter).next_u64())
                      : eliminate_outliers(result.labels, visual_unit,
                                           params.outlier_frac);
      counts.eliminated = elim.eliminated.size();
      result.labels = std::move(elim.labels);
      result.post_last_elimination = result.labels;

      auto grouped = group_outliers(result.labels, visual_unit,
                                    params.sim_thresh_outliers, params.grouping);
      counts.grouped_outliers = grouped.grouped;
      counts.new_clusters = grouped.new_clusters;
      result.labels = std::move(grouped.labels);
    }
    if (params.toggles.reassign) {
      result.labels = reassign_outliers(result.labels, visual_unit,
                                        params.sim_thresh_reassign,
                                        &counts.reassigned);
    }
    // Merging runs on the iteration's final compositions so clusters born
    // from grouping are consolidated in the same pass.
    if (params.toggles.merge) {
      result.labels = merge_clusters(result.labels, visual_unit,
                                     params.sim_thresh_merge, &counts.merges);
    }
    result.trace.iterations.push_back(counts);
  }
  result.pre_promotion = result.labels;
  result.labels =
      promote_singletons(result.labels, &result.trace.promoted_singletons);
  return result;
}

}  // namespace

RefineResult refine(const ClusterLabels& initial,
                    const EmbeddingMatrix& visual_unit,
                    const RefineParams& params) {
  return run_refine(initial, visual_unit, params, false, 0);
}

RefineResult refine_random_elimination(const ClusterLabels& initial,
                                       const EmbeddingMatrix& visual_unit,
                                       const RefineParams& params,
                                       std::uint64_t seed) {
  return run_refine(initial, visual_unit, params, true, seed);
}

std::string RefineTrace::to_json() const {
  nlohmann::json j;
  j["iterations"] = nlohmann::json::array();
  for (const auto& it : iterations) {
    j["iterations"].push_back({{"eliminated", it.eliminated},
                               {"merges", it.merges},
                               {"grouped_outliers", it.grouped_outliers},
                               {"new_clusters", it.new_clusters},
                               {"reassigned", it.reassigned}});
  }
  j["promoted_singletons"] = promoted_singletons;
  return j.dump(2);
}

}  // namespace canopy
