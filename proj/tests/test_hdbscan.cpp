#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "canopy/error.hpp"
#include "canopy/hdbscan.hpp"
#include "support/hdbscan_reference.hpp"
#include "support/test_support.hpp"

using namespace canopy;
using canopy::test_support::adjusted_rand_index;
using canopy::test_support::euclidean_matrix;
using canopy::test_support::min_spanning_weight_bruteforce;

namespace {

DistanceMatrix from_values(const std::vector<std::vector<double>>& rows) {
  DistanceMatrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      m.at(i, j) = static_cast<float>(rows[i][j]);
    }
  }
  return m;
}

// Two well-separated identical-point groups at mutual distance one.
DistanceMatrix two_groups(std::size_t per_group) {
  const std::size_t n = 2 * per_group;
  DistanceMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool same = (i < per_group) == (j < per_group);
      m.at(i, j) = (i == j || same) ? 0.0f : 1.0f;
    }
  }
  return m;
}

std::vector<std::pair<double, double>> random_groups(Rng& rng, int n_groups,
                                                     std::size_t total,
                                                     double spread,
                                                     double separation) {
  std::vector<std::pair<double, double>> centers;
  // Centers on a coarse lattice guarantee the separation.
  for (int g = 0; g < n_groups; ++g) {
    centers.emplace_back(static_cast<double>(g % 2) * separation,
                         static_cast<double>(g / 2) * separation);
  }
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& c = centers[i % centers.size()];
    points.emplace_back(c.first + spread * rng.normal(),
                        c.second + spread * rng.normal());
  }
  return points;
}

}  // namespace

TEST_SUITE("hdbscan") {

TEST_CASE("core distances on small fixtures") {
  const auto identical = from_values({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  auto cores = core_distances(identical, 1);
  for (float c : cores) CHECK(c == 0.0f);

  const auto simplex = from_values({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  cores = core_distances(simplex, 2);
  for (float c : cores) CHECK(c == 1.0f);

  const auto line = from_values({{0, 1, 3}, {1, 0, 2}, {3, 2, 0}});
  cores = core_distances(line, 1);
  CHECK(cores[0] == 1.0f);
  CHECK(cores[1] == 1.0f);
  CHECK(cores[2] == 2.0f);

  CHECK_THROWS_AS(core_distances(simplex, 3), InvariantError);
}

TEST_CASE("mutual reachability is the elementwise max") {
  const auto line = from_values({{0, 1, 3}, {1, 0, 2}, {3, 2, 0}});
  const auto cores = core_distances(line, 1);
  const auto m = mutual_reachability(line, cores);
  CHECK(m.at(0, 1) == 1.0f);
  CHECK(m.at(0, 2) == 3.0f);
  CHECK(m.at(1, 2) == 2.0f);
  for (std::size_t i = 0; i < 3; ++i) CHECK(m.at(i, i) == 0.0f);

  const auto identical = from_values({{0, 0.5, 0.5}, {0.5, 0, 0.5}, {0.5, 0.5, 0}});
  const std::vector<float> zero_cores{0.0f, 0.0f, 0.0f};
  const auto same = mutual_reachability(identical, zero_cores);
  CHECK(same.at(0, 1) == identical.at(0, 1));

  // Distances below both cores clamp up to the larger core.
  const std::vector<float> big_cores{0.7f, 0.9f, 0.8f};
  const auto clamped = mutual_reachability(identical, big_cores);
  CHECK(clamped.at(0, 1) == 0.9f);
  CHECK(clamped.at(0, 2) == 0.8f);
}

TEST_CASE("minimum spanning tree basics") {
  const auto pair = from_values({{0, 0.25}, {0.25, 0}});
  auto mst = minimum_spanning_tree(pair);
  REQUIRE(mst.size() == 1);
  CHECK(mst[0].u == 0);
  CHECK(mst[0].v == 1);
  CHECK(mst[0].w == 0.25f);

  const auto path = from_values({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  mst = minimum_spanning_tree(path);
  REQUIRE(mst.size() == 2);
  CHECK(mst[0].w == 1.0f);
  CHECK(mst[1].w == 1.0f);
}

TEST_CASE("mst weight equals the exhaustive minimum over spanning trees") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    DistanceMatrix m(8);
    for (std::size_t i = 0; i < 8; ++i) {
      for (std::size_t j = i + 1; j < 8; ++j) {
        const float w = static_cast<float>(rng.uniform(0.01, 2.0));
        m.at(i, j) = w;
        m.at(j, i) = w;
      }
    }
    const auto mst = minimum_spanning_tree(m);
    double total = 0.0;
    for (const auto& e : mst) total += e.w;
    const double brute = min_spanning_weight_bruteforce(m);
    CHECK(total == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("extract_clusters size floor") {
  const auto pair = from_values({{0, 1}, {1, 0}});
  const auto mst = minimum_spanning_tree(pair);
  const auto labels = extract_clusters(mst, 2, 3);
  CHECK(labels.num_clusters == 0);
  for (int l : labels.labels) CHECK(l == kNoise);
}

TEST_CASE("two identical-point groups give exactly the groups") {
  const auto m = two_groups(10);
  const auto labels = hdbscan(m, 2, 1);
  REQUIRE(labels.num_clusters == 2);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(labels.labels[i] == (i < 10 ? 0 : 1));
  }
  const auto ref = test_support::reference_hdbscan(m, 2, 1);
  CHECK(adjusted_rand_index(labels.labels, ref) == doctest::Approx(1.0));
}

TEST_CASE("a single tight blob is one cluster with no noise") {
  DistanceMatrix m(20);  // identical points
  const auto labels = hdbscan(m, 2, 1);
  CHECK(labels.num_clusters == 1);
  for (int l : labels.labels) CHECK(l == 0);

  const auto ref = test_support::reference_hdbscan(m, 2, 1);
  CHECK(adjusted_rand_index(labels.labels, ref) == doctest::Approx(1.0));
}

TEST_CASE("agreement with the reference implementation on random instances") {
  Rng rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    const int n_groups = 2 + static_cast<int>(rng.uniform_index(3));
    const std::size_t total = 24 + rng.uniform_index(40);
    const auto points = random_groups(rng, n_groups, total, 0.01, 0.4);
    const auto m = euclidean_matrix(points, 1.0);
    const int mcs = 2 + static_cast<int>(rng.uniform_index(4));
    const int ms = 1 + static_cast<int>(rng.uniform_index(3));
    const auto mine = hdbscan(m, mcs, ms);
    const auto ref = test_support::reference_hdbscan(m, mcs, ms);
    CHECK(adjusted_rand_index(mine.labels, ref) == doctest::Approx(1.0));
  }
}

TEST_CASE("permuting the input permutes the partition") {
  Rng rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 12 + rng.uniform_index(53);
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < n; ++i) {
      points.emplace_back(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
    }
    const auto m = euclidean_matrix(points, 1.0);
    const auto base = hdbscan(m, 3, 2);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    DistanceMatrix pm(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        pm.at(i, j) = m.at(perm[i], perm[j]);
      }
    }
    const auto permuted = hdbscan(pm, 3, 2);
    std::vector<int> mapped_back(n);
    for (std::size_t i = 0; i < n; ++i) {
      mapped_back[perm[i]] = permuted.labels[i];
    }
    CHECK(adjusted_rand_index(base.labels, mapped_back) == doctest::Approx(1.0));
  }
}

TEST_CASE("no output cluster is smaller than min_cluster_size") {
  Rng rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + rng.uniform_index(40);
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < n; ++i) {
      points.emplace_back(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
    }
    const auto m = euclidean_matrix(points, 1.0);
    const int mcs = 2 + static_cast<int>(rng.uniform_index(5));
    const auto labels = hdbscan(m, mcs, 2);
    std::vector<int> sizes(static_cast<std::size_t>(labels.num_clusters), 0);
    for (int l : labels.labels) {
      if (l != kNoise) ++sizes[static_cast<std::size_t>(l)];
    }
    for (int s : sizes) CHECK(s >= mcs);
  }
}

TEST_CASE("raising min_cluster_size never yields more clusters") {
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 20 + rng.uniform_index(30);
    std::vector<std::pair<double, double>> points;
    for (std::size_t i = 0; i < n; ++i) {
      points.emplace_back(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
    }
    const auto m = euclidean_matrix(points, 1.0);
    int previous = static_cast<int>(n) + 1;
    for (int mcs : {2, 4, 6}) {
      const auto labels = hdbscan(m, mcs, 2);
      CHECK(labels.num_clusters <= previous);
      previous = labels.num_clusters;
    }
  }
}

TEST_CASE("labels are canonical and deterministic") {
  Rng rng(67);
  std::vector<std::pair<double, double>> points;
  for (std::size_t i = 0; i < 40; ++i) {
    points.emplace_back(rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0));
  }
  const auto m = euclidean_matrix(points, 1.0);
  const auto a = hdbscan(m, 3, 2);
  const auto b = hdbscan(m, 3, 2);
  CHECK(a.labels == b.labels);

  // First-appearance canonical order.
  int seen = 0;
  for (int l : a.labels) {
    if (l == kNoise) continue;
    CHECK(l <= seen);
    if (l == seen) ++seen;
  }
}

}  // TEST_SUITE
