#include <doctest.h>

#include <cmath>
#include <vector>

#include "canopy/error.hpp"
#include "canopy/similarity.hpp"
#include "support/test_support.hpp"

using namespace canopy;
using canopy::test_support::random_unit_matrix;

namespace {

EmbeddingMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  EmbeddingMatrix m(EmbeddingKind::visual, rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("normalize_rows produces unit rows") {
  const auto m = from_rows({{3.0, 4.0}, {1.0, 0.0}});
  const auto unit = normalize_rows(m);
  CHECK(unit.at(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(unit.at(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(unit.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));

  const auto zero = from_rows({{0.0, 0.0}});
  CHECK_THROWS_WITH_AS(normalize_rows(zero), doctest::Contains("row 0"),
                       InvariantError);
}

TEST_CASE("cosine endpoints") {
  const std::vector<double> e1{1.0, 0.0};
  const std::vector<double> e2{0.0, 1.0};
  const std::vector<double> neg{-1.0, 0.0};
  CHECK(cosine(e1, e1) == doctest::Approx(1.0));
  CHECK(cosine(e1, e2) == doctest::Approx(0.0));
  CHECK(cosine(e1, neg) == doctest::Approx(-1.0));
  const std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(cosine(e1, zero), InvariantError);
}

TEST_CASE("cosine is symmetric and scale invariant") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(4), b(4);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    const double base = cosine(a, b);
    CHECK(cosine(b, a) == base);
    const double scale = rng.uniform(0.01, 100.0);
    std::vector<double> a2 = a;
    for (auto& x : a2) x *= scale;
    CHECK(std::abs(cosine(a2, b) - base) <= 1e-12);
  }
}

TEST_CASE("cosine_distance_matrix on simple geometries") {
  const auto identical = cosine_distance_matrix(
      normalize_rows(from_rows({{1.0, 0.0}, {2.0, 0.0}})));
  CHECK(identical.at(0, 1) == doctest::Approx(0.0));

  const auto antipodal = cosine_distance_matrix(
      normalize_rows(from_rows({{1.0, 0.0}, {-1.0, 0.0}})));
  CHECK(antipodal.at(0, 1) == doctest::Approx(2.0));

  const auto ortho = cosine_distance_matrix(normalize_rows(
      from_rows({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}})));
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(ortho.at(i, j) == doctest::Approx(i == j ? 0.0 : 1.0));
    }
  }
}

TEST_CASE("distance matrix invariants over random inputs") {
  Rng rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto m = random_unit_matrix(6, 5, rng);
    const auto d = cosine_distance_matrix(m);
    for (std::size_t i = 0; i < d.n; ++i) {
      CHECK(d.at(i, i) == 0.0f);
      for (std::size_t j = 0; j < d.n; ++j) {
        CHECK(d.at(i, j) == d.at(j, i));
        CHECK(d.at(i, j) >= 0.0f);
        CHECK(d.at(i, j) <= 2.0f);
      }
    }
  }
}

TEST_CASE("centroid of members") {
  const auto m = from_rows({{1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}});
  const std::vector<std::size_t> single{0};
  auto c = centroid(m, single);
  CHECK(c[0] == doctest::Approx(1.0));

  const std::vector<std::size_t> twins{0, 2};
  c = centroid(m, twins);
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.0));

  const std::vector<std::size_t> pair{0, 1};
  c = centroid(m, pair);
  CHECK(c[0] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  CHECK(c[1] == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));

  CHECK_THROWS_AS(centroid(m, std::vector<std::size_t>{}), InvariantError);

  const auto anti = from_rows({{1.0, 0.0}, {-1.0, 0.0}});
  const std::vector<std::size_t> both{0, 1};
  CHECK_THROWS_AS(centroid(anti, both), InvariantError);
}

TEST_CASE("mean_intra_similarity fixed cases") {
  const auto identical =
      from_rows({{1.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}});
  const std::vector<std::size_t> all{0, 1, 2};
  auto sims = mean_intra_similarity(identical, all);
  for (double s : sims) CHECK(s == doctest::Approx(1.0));

  const auto ortho = from_rows({{1.0, 0.0}, {0.0, 1.0}});
  const std::vector<std::size_t> pair{0, 1};
  sims = mean_intra_similarity(ortho, pair);
  CHECK(sims[0] == doctest::Approx(0.0));
  CHECK(sims[1] == doctest::Approx(0.0));

  const auto mixed = from_rows({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
  sims = mean_intra_similarity(mixed, all);
  CHECK(sims[0] == doctest::Approx(0.5));
  CHECK(sims[1] == doctest::Approx(0.5));
  CHECK(sims[2] == doctest::Approx(0.0));

  const std::vector<std::size_t> lone{0};
  CHECK_THROWS_AS(mean_intra_similarity(mixed, lone), InvariantError);
}

TEST_CASE("mean_intra_similarity matches the brute-force pairwise average") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t count = 2 + rng.uniform_index(9);
    const auto m = random_unit_matrix(count, 6, rng);
    std::vector<std::size_t> members(count);
    for (std::size_t i = 0; i < count; ++i) members[i] = i;
    const auto fast = mean_intra_similarity(m, members);
    for (std::size_t i = 0; i < count; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < count; ++j) {
        if (j != i) acc += cosine(m.row(i), m.row(j));
      }
      const double brute = acc / static_cast<double>(count - 1);
      CHECK(std::abs(fast[i] - brute) <= 1e-9);
      CHECK(fast[i] >= -1.0);
      CHECK(fast[i] <= 1.0);
    }
  }
}

}  // TEST_SUITE
