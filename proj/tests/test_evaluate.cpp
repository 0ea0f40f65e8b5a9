#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "canopy/error.hpp"
#include "canopy/evaluate.hpp"
#include "support/test_support.hpp"

using namespace canopy;
using canopy::test_support::brute_force_w1_equal;

namespace {

std::vector<double> random_samples(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-3.0, 3.0);
  return v;
}

// Checkerboard field over a full w x h grid.
std::pair<std::vector<CellId>, std::vector<double>> checkerboard(int w, int h) {
  std::vector<CellId> cells;
  std::vector<double> field;
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      cells.push_back({x, y});
      field.push_back(((x + y) % 2 == 0) ? 1.0 : -1.0);
    }
  }
  return {cells, field};
}

}  // namespace

TEST_SUITE("evaluate") {

TEST_CASE("rmse fixed values") {
  const std::vector<double> t{1.0, 2.0, 3.0};
  CHECK(rmse(t, t) == doctest::Approx(0.0));

  const std::vector<double> shifted{3.0, 4.0, 5.0};
  CHECK(rmse(shifted, t) == doctest::Approx(2.0).epsilon(1e-12));

  const std::vector<double> pred{3.0, -4.0};
  const std::vector<double> zero{0.0, 0.0};
  CHECK(rmse(pred, zero) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-12));
  CHECK(rmse(pred, zero) == doctest::Approx(3.535534));

  const std::vector<double> small{1.0};
  CHECK_THROWS_AS(rmse(small, t), InvariantError);
}

TEST_CASE("rmse is zero only for identical fields") {
  Rng rng(81);
  for (int trial = 0; trial < 200; ++trial) {
    auto a = random_samples(rng, 8);
    auto b = a;
    CHECK(rmse(a, b) == 0.0);
    b[rng.uniform_index(8)] += rng.uniform(0.01, 1.0);
    CHECK(rmse(a, b) > 0.0);
  }
}

TEST_CASE("v_score endpoints and the conditional-entropy example") {
  const std::vector<int> taxa{0, 0, 1, 1};
  CHECK(v_score(taxa, taxa) == doctest::Approx(1.0));

  const std::vector<int> lump{0, 0, 0, 0};
  CHECK(v_score(taxa, lump) == doctest::Approx(0.0));

  // taxa (a,a,b,b), clusters (0,0,1,2): every cluster is pure so h = 1.
  // H(K|C) = 0.5 ln 2, H(K) = 1.5 ln 2 - 0.5 ln ... computed directly below.
  const std::vector<int> split{0, 0, 1, 2};
  const double h_k = -(0.5 * std::log(0.5) + 2.0 * 0.25 * std::log(0.25));
  const double h_k_given_c = 0.5 * std::log(2.0);
  const double c = 1.0 - h_k_given_c / h_k;
  const double expected_v = 2.0 * 1.0 * c / (1.0 + c);
  CHECK(c == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(v_score(taxa, split) == doctest::Approx(expected_v).epsilon(1e-12));
  CHECK(v_score(taxa, split) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("v_score swaps homogeneity and completeness symmetrically") {
  Rng rng(83);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> a(12), b(12);
    for (auto& x : a) x = static_cast<int>(rng.uniform_index(4));
    for (auto& x : b) x = static_cast<int>(rng.uniform_index(5));
    CHECK(v_score(a, b) == doctest::Approx(v_score(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("wasserstein1 fixed cases") {
  const std::vector<double> a{0.0, 1.0};
  CHECK(wasserstein1(a, a) == doctest::Approx(0.0));

  const std::vector<double> zero{0.0};
  const std::vector<double> one{1.0};
  CHECK(wasserstein1(zero, one) == doctest::Approx(1.0));

  const std::vector<double> b{0.5, 1.5};
  CHECK(wasserstein1(a, b) == doctest::Approx(0.5).epsilon(1e-12));

  // Unequal sizes, exact CDF area: {0,2} vs {1} moves both halves by 1.
  const std::vector<double> two{0.0, 2.0};
  CHECK(wasserstein1(two, one) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> pair01{0.0, 1.0};
  CHECK(wasserstein1(pair01, zero) == doctest::Approx(0.5).epsilon(1e-12));

  const std::vector<double> empty;
  CHECK_THROWS_AS(wasserstein1(empty, a), InvariantError);
}

TEST_CASE("wasserstein1 equals exhaustive matching on equal sizes") {
  Rng rng(87);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(10);
    const auto a = random_samples(rng, n);
    const auto b = random_samples(rng, n);
    CHECK(wasserstein1(a, b) ==
          doctest::Approx(brute_force_w1_equal(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("wasserstein1 satisfies the metric axioms") {
  Rng rng(89);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto a = random_samples(rng, 1 + rng.uniform_index(8));
    const auto b = random_samples(rng, 1 + rng.uniform_index(8));
    const auto c = random_samples(rng, 1 + rng.uniform_index(8));
    CHECK(wasserstein1(a, a) <= 1e-12);
    CHECK(wasserstein1(a, b) ==
          doctest::Approx(wasserstein1(b, a)).epsilon(1e-12));
    CHECK(wasserstein1(a, c) <=
          wasserstein1(a, b) + wasserstein1(b, c) + 1e-9);
  }
}

TEST_CASE("grid adjacency queen vs rook") {
  std::vector<CellId> cells;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) cells.push_back({x, y});
  }
  const auto queen = grid_adjacency(cells, Adjacency::queen);
  const auto rook = grid_adjacency(cells, Adjacency::rook);
  // Center cell (1,1) is index 4 in x-major order.
  CHECK(queen[4].size() == 8);
  CHECK(rook[4].size() == 4);
  CHECK(queen[0].size() == 3);
  CHECK(rook[0].size() == 2);
}

TEST_CASE("morans_i is -1 on a rook checkerboard") {
  const auto [cells, field] = checkerboard(8, 8);
  const auto rook = grid_adjacency(cells, Adjacency::rook);
  const auto result = morans_i(field, rook, 99, 7);
  CHECK(result.i == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("morans_i rejects degenerate inputs") {
  const auto [cells, field] = checkerboard(4, 4);
  const auto queen = grid_adjacency(cells, Adjacency::queen);
  const std::vector<double> constant(cells.size(), 3.0);
  CHECK_THROWS_AS(morans_i(constant, queen, 99, 7), InvariantError);

  std::vector<CellId> isolated{{0, 0}, {10, 10}, {20, 20}};
  const auto none = grid_adjacency(isolated, Adjacency::queen);
  const std::vector<double> f{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(morans_i(f, none, 99, 7), InvariantError);
}

TEST_CASE("a smooth gradient is significantly autocorrelated") {
  std::vector<CellId> cells;
  std::vector<double> field;
  for (int x = 0; x < 10; ++x) {
    for (int y = 0; y < 10; ++y) {
      cells.push_back({x, y});
      field.push_back(static_cast<double>(x));
    }
  }
  const auto queen = grid_adjacency(cells, Adjacency::queen);
  const auto result = morans_i(field, queen, 999, 11);
  CHECK(result.i > 0.0);
  CHECK(result.p_value < 0.05);
}

TEST_CASE("morans_i is invariant under positive affine maps") {
  Rng rng(91);
  std::vector<CellId> cells;
  std::vector<double> field;
  for (int x = 0; x < 6; ++x) {
    for (int y = 0; y < 6; ++y) {
      cells.push_back({x, y});
      field.push_back(rng.uniform(0.0, 5.0));
    }
  }
  const auto queen = grid_adjacency(cells, Adjacency::queen);
  const double base = morans_i(field, queen, 0, 0).i;
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = rng.uniform(0.1, 10.0);
    const double beta = rng.uniform(-5.0, 5.0);
    auto mapped = field;
    for (double& v : mapped) v = alpha * v + beta;
    CHECK(std::abs(morans_i(mapped, queen, 0, 0).i - base) <= 1e-12);
  }
}

TEST_CASE("bootstrap of a constant metric collapses") {
  const auto ci = bootstrap_ci(
      10, [](std::span<const std::size_t>) { return 2.5; }, 200, 0.95, 5);
  CHECK(ci.point == 2.5);
  CHECK(ci.mean == doctest::Approx(2.5));
  CHECK(ci.lo == doctest::Approx(2.5));
  CHECK(ci.hi == doctest::Approx(2.5));
}

TEST_CASE("bootstrap interval brackets the replicate mean") {
  Rng rng(93);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> values(30);
    for (auto& v : values) v = rng.uniform(0.0, 10.0);
    const auto ci = bootstrap_ci(
        values.size(),
        [&](std::span<const std::size_t> idx) {
          double acc = 0.0;
          for (std::size_t i : idx) acc += values[i];
          return acc / static_cast<double>(idx.size());
        },
        1000, 0.95, 1000 + static_cast<std::uint64_t>(trial));
    CHECK(ci.lo <= ci.mean);
    CHECK(ci.mean <= ci.hi);
    CHECK(ci.lo <= ci.point);
    CHECK(ci.point <= ci.hi);
  }
}

TEST_CASE("quadrupling the cells halves the interval width") {
  Rng rng(97);
  std::vector<double> widths_small, widths_big;
  for (int fixture = 0; fixture < 15; ++fixture) {
    std::vector<double> small(100), big(400);
    for (auto& v : small) v = rng.normal();
    for (auto& v : big) v = rng.normal();
    auto mean_metric = [](const std::vector<double>& values) {
      return [&values](std::span<const std::size_t> idx) {
        double acc = 0.0;
        for (std::size_t i : idx) acc += values[i];
        return acc / static_cast<double>(idx.size());
      };
    };
    const auto ci_small =
        bootstrap_ci(small.size(), mean_metric(small), 600, 0.95, 7 + fixture);
    const auto ci_big =
        bootstrap_ci(big.size(), mean_metric(big), 600, 0.95, 77 + fixture);
    widths_small.push_back(ci_small.hi - ci_small.lo);
    widths_big.push_back(ci_big.hi - ci_big.lo);
  }
  std::sort(widths_small.begin(), widths_small.end());
  std::sort(widths_big.begin(), widths_big.end());
  const double ratio = widths_big[7] / widths_small[7];
  CHECK(ratio > 0.35);
  CHECK(ratio < 0.65);
}

TEST_CASE("baseline mean predictor identities") {
  const std::vector<double> constant{4.0, 4.0, 4.0};
  auto stats = baseline_mean_predictor(constant);
  CHECK(stats.rmse_baseline == doctest::Approx(0.0));
  CHECK(stats.w1_baseline == doctest::Approx(0.0));

  const std::vector<double> two{0.0, 2.0};
  stats = baseline_mean_predictor(two);
  CHECK(stats.rmse_baseline == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats.w1_baseline == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("baseline rmse equals the population standard deviation") {
  Rng rng(101);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(40);
    auto field = random_samples(rng, n);
    double mean = 0.0;
    for (double v : field) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : field) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    const auto stats = baseline_mean_predictor(field);
    CHECK(std::abs(stats.rmse_baseline - sd) <= 1e-9);
  }
}

TEST_CASE("diagnostics identity and aggregation") {
  // Identity: prediction equals the genus partition.
  const std::vector<CellId> cells{{0, 0}, {0, 0}, {0, 0}, {1, 0}, {1, 0}};
  const std::vector<int> genus{0, 0, 1, 1, 1};
  const auto truth_field = diversity_field(cells, genus);
  auto rec = diagnostics(genus, genus, truth_field, truth_field);
  CHECK(rec.oversplit_factor == doctest::Approx(1.0));
  CHECK(rec.purity_micro == doctest::Approx(1.0));
  CHECK(rec.delta_evenness == doctest::Approx(0.0));
  CHECK(rec.rank_abundance_rho == doctest::Approx(1.0));
  CHECK(rec.shannon_gap == doctest::Approx(0.0));
  CHECK(rec.simpson_gap == doctest::Approx(0.0));
  CHECK(rec.singleton_ratio == doctest::Approx(0.0));

  // Every tree its own cluster.
  const std::vector<int> singletons{0, 1, 2, 3, 4};
  const auto pred_field = diversity_field(cells, singletons);
  rec = diagnostics(genus, singletons, truth_field, pred_field);
  CHECK(rec.purity_micro == doctest::Approx(1.0));
  CHECK(rec.oversplit_factor == doctest::Approx(5.0 / 2.0));
  CHECK(rec.singleton_ratio == doctest::Approx(1.0));
}

TEST_CASE("rank-abundance aggregation by majority genus") {
  // Genera: A=60, B=40 trees; clusters 40/30/30 with majorities A, A, B.
  std::vector<CellId> cells;
  std::vector<int> genus;
  std::vector<int> cluster;
  for (int i = 0; i < 100; ++i) {
    cells.push_back({0, 0});
    if (i < 40) {
      genus.push_back(0);  // A
      cluster.push_back(0);
    } else if (i < 60) {
      genus.push_back(0);  // A
      cluster.push_back(1);
    } else if (i < 70) {
      genus.push_back(1);  // B
      cluster.push_back(1);
    } else {
      genus.push_back(1);  // B
      cluster.push_back(2);
    }
  }
  // cluster 0: 40 A; cluster 1: 20 A + 10 B -> majority A; cluster 2: 30 B.
  const auto truth_field = diversity_field(cells, genus);
  const auto pred_field = diversity_field(cells, cluster);
  const auto rec = diagnostics(genus, cluster, truth_field, pred_field);
  CHECK(rec.oversplit_factor == doctest::Approx(1.5));
  CHECK(rec.rank_abundance_rho == doctest::Approx(1.0));  // A:70 > B:30
}

TEST_CASE("evaluate_city report on an exact prediction") {
  std::vector<CellId> cells;
  std::vector<int> genus;
  Rng rng(103);
  for (int x = 0; x < 5; ++x) {
    for (int y = 0; y < 5; ++y) {
      for (int t = 0; t < 6; ++t) {
        cells.push_back({x, y});
        genus.push_back(static_cast<int>(rng.uniform_index(3)));
      }
    }
  }
  EvalOptions options;
  options.n_perm = 99;
  options.bootstrap_b = 200;
  const auto report = evaluate_city(cells, genus, genus, options);
  CHECK(report.rmse_alpha.point == doctest::Approx(0.0));
  CHECK(report.v.point == doctest::Approx(1.0));
  CHECK(report.w1_shannon.point == doctest::Approx(0.0));
  CHECK(report.w1_simpson.point == doctest::Approx(0.0));
  CHECK(report.diag.purity_micro == doctest::Approx(1.0));
  CHECK(report.rmse_baseline == doctest::Approx(report.truth_richness_sd));
  const auto json = report.to_json();
  CHECK(json.find("reconstructed") != std::string::npos);
  CHECK(json.find("w1_shannon") != std::string::npos);
}

}  // TEST_SUITE
