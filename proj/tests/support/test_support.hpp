#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "canopy/rng.hpp"
#include "canopy/similarity.hpp"

namespace canopy::test_support {

// Adjusted Rand index between two labelings (noise treated as its own id).
inline double adjusted_rand_index(std::span<const int> a,
                                  std::span<const int> b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, long long> joint;
  std::map<int, long long> ma, mb;
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++ma[a[i]];
    ++mb[b[i]];
  }
  auto choose2 = [](long long x) { return x * (x - 1) / 2.0; };
  double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : joint) sum_ij += choose2(c);
  for (const auto& [key, c] : ma) sum_a += choose2(c);
  for (const auto& [key, c] : mb) sum_b += choose2(c);
  const double total = choose2(static_cast<long long>(n));
  const double expected = sum_a * sum_b / total;
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (sum_ij - expected) / (max_index - expected);
}

// Minimum spanning weight by enumerating every labeled tree on n vertices
// through Prufer sequences (exact for small n).
inline double min_spanning_weight_bruteforce(const DistanceMatrix& m) {
  const int n = static_cast<int>(m.n);
  if (n == 2) return m.at(0, 1);
  const int seq_len = n - 2;
  std::vector<int> seq(seq_len, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    // Decode the Prufer sequence into tree edges.
    std::vector<int> degree(n, 1);
    for (int s : seq) ++degree[s];
    double weight = 0.0;
    std::vector<int> deg = degree;
    std::vector<char> used(n, 0);
    for (int k = 0; k < seq_len; ++k) {
      int leaf = -1;
      for (int v = 0; v < n; ++v) {
        if (!used[v] && deg[v] == 1) {
          leaf = v;
          break;
        }
      }
      weight += m.at(static_cast<std::size_t>(leaf),
                     static_cast<std::size_t>(seq[k]));
      used[leaf] = 1;
      --deg[seq[k]];
    }
    int u = -1, v = -1;
    for (int x = 0; x < n; ++x) {
      if (!used[x] && deg[x] == 1) {
        if (u < 0) {
          u = x;
        } else {
          v = x;
        }
      }
    }
    weight += m.at(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
    best = std::min(best, weight);

    int pos = seq_len - 1;
    while (pos >= 0 && seq[pos] == n - 1) {
      seq[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++seq[pos];
  }
  return best;
}

// Exact minimum-cost perfect matching between equal-size samples by
// branch-and-bound over assignments; returns mean matched distance.
inline double brute_force_w1_equal(std::span<const double> a,
                                   std::span<const double> b) {
  const std::size_t n = a.size();
  std::vector<char> used(n, 0);
  double best = std::numeric_limits<double>::infinity();
  const std::function<void(std::size_t, double)> recurse =
      [&](std::size_t i, double cost) {
        if (cost >= best) return;
        if (i == n) {
          best = cost;
          return;
        }
        for (std::size_t j = 0; j < n; ++j) {
          if (used[j]) continue;
          used[j] = 1;
          recurse(i + 1, cost + std::abs(a[i] - b[j]));
          used[j] = 0;
        }
      };
  recurse(0, 0.0);
  return best / static_cast<double>(n);
}

// Random unit-row embedding matrix.
inline EmbeddingMatrix random_unit_matrix(std::size_t n, std::size_t d,
                                          Rng& rng) {
  EmbeddingMatrix m(EmbeddingKind::visual, n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    auto row = m.row(i);
    do {
      norm = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        row[j] = rng.normal();
        norm += row[j] * row[j];
      }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < d; ++j) row[j] /= norm;
  }
  return m;
}

// Euclidean distance matrix from planar points, scaled into [0, 2] so it
// satisfies the DistanceMatrix range invariant.
inline DistanceMatrix euclidean_matrix(
    const std::vector<std::pair<double, double>>& points, double scale) {
  DistanceMatrix m(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double dx = points[i].first - points[j].first;
      const double dy = points[i].second - points[j].second;
      const float w = static_cast<float>(std::sqrt(dx * dx + dy * dy) * scale);
      m.at(i, j) = w;
      m.at(j, i) = w;
    }
  }
  return m;
}

}  // namespace canopy::test_support
