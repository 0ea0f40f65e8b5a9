#include "canopy/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include <nlohmann/json.hpp>

#include "canopy/error.hpp"
#include "canopy/rng.hpp"

namespace canopy {

namespace {

constexpr double kBaseLat = 40.7;
constexpr double kBaseLon = -100.0;
constexpr double kDegToRad = std::numbers::pi / 180.0;

// Truncate to f32 so generated embeddings survive the EMB1 round trip
// bit-exactly.
double quantize(double v) { return static_cast<double>(static_cast<float>(v)); }

std::vector<double> random_unit_vector(Rng& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm += x * x;
    }
  } while (norm < 1e-12);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

std::pair<double, double> to_lat_lon(double x, double y) {
  const double lat = kBaseLat + y / (kEarthRadiusM * kDegToRad);
  const double lon =
      kBaseLon + x / (kEarthRadiusM * kDegToRad * std::cos(kBaseLat * kDegToRad));
  return {lat, lon};
}

}  // namespace

std::vector<std::vector<double>> genus_directions(int n_genera, int dim,
                                                  double min_angle_deg,
                                                  std::uint64_t seed) {
  if (n_genera < 1) throw InvariantError("need at least one genus");
  if (dim < 2) throw InvariantError("genus direction dim must be >= 2");
  if (min_angle_deg <= 0.0 || min_angle_deg > 90.0) {
    throw InvariantError("min_genus_angle_deg must be in (0, 90]");
  }
  const double max_cos = std::cos(min_angle_deg * kDegToRad);
  Rng rng(seed);
  std::vector<std::vector<double>> dirs;
  dirs.reserve(static_cast<std::size_t>(n_genera));
  constexpr int kMaxRetries = 20000;
  for (int g = 0; g < n_genera; ++g) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRetries && !placed; ++attempt) {
      auto candidate = random_unit_vector(rng, dim);
      bool ok = true;
      for (const auto& d : dirs) {
        double dot = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) dot += d[j] * candidate[j];
        // Tiny slack so exact right angles pass the 90-degree constraint.
        if (dot > max_cos + 1e-12) {
          ok = false;
          break;
        }
      }
      if (ok) {
        dirs.push_back(std::move(candidate));
        placed = true;
      }
    }
    if (!placed) {
      throw InvariantError("could not satisfy genus angle constraint for " +
                           std::to_string(n_genera) + " directions in dim " +
                           std::to_string(dim));
    }
  }
  return dirs;
}

SynthCity generate_city(const SynthConfig& config) {
  if (config.n_streets < 1) throw InvariantError("need at least one street");
  if (config.n_trees < 1) throw InvariantError("need at least one tree");
  if (config.visual_noise_sigma < 0.0 || config.spatial_bandwidth_m <= 0.0) {
    throw InvariantError("bad synth noise/bandwidth parameters");
  }

  const auto dirs =
      genus_directions(config.n_genera, config.visual_dim,
                       config.min_genus_angle_deg, config.seed ^ 0x67656e75ULL);

  Rng street_rng = Rng::substream(config.seed, 1);
  Rng visual_rng = Rng::substream(config.seed, 2);
  Rng rff_rng = Rng::substream(config.seed, 3);

  // Zipf-like genus weights over ranks.
  std::vector<double> cum(static_cast<std::size_t>(config.n_genera), 0.0);
  double total_w = 0.0;
  for (int g = 0; g < config.n_genera; ++g) {
    total_w += std::pow(static_cast<double>(g + 1), -config.dominance_exponent);
    cum[static_cast<std::size_t>(g)] = total_w;
  }

  auto draw_genus = [&]() {
    const double u = street_rng.uniform() * total_w;
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    return static_cast<int>(it - cum.begin());
  };

  const double extent = 2.0 * config.street_length_m;
  const int per_street = std::max(
      1, static_cast<int>(std::llround(static_cast<double>(config.n_trees) /
                                       static_cast<double>(config.n_streets))));

  struct PlantedTree {
    double x, y;
    int genus;
  };
  std::vector<PlantedTree> trees;
  trees.reserve(static_cast<std::size_t>(per_street * config.n_streets));
  for (int s = 0; s < config.n_streets; ++s) {
    const bool horizontal = (street_rng.next_u64() & 1) == 0;
    const double x0 = street_rng.uniform(0.0, extent);
    const double y0 = street_rng.uniform(0.0, extent);
    const int genus = draw_genus();
    double along = 0.0;
    for (int t = 0; t < per_street; ++t) {
      trees.push_back(horizontal ? PlantedTree{x0 + along, y0, genus}
                                 : PlantedTree{x0, y0 + along, genus});
      const double step = street_rng.uniform(
          config.tree_spacing_mean_m - config.tree_spacing_jitter_m,
          config.tree_spacing_mean_m + config.tree_spacing_jitter_m);
      along += std::max(step, 0.5);
    }
  }

  SynthCity city;
  const std::size_t n = trees.size();
  city.records.reserve(n);
  city.visual = EmbeddingMatrix(EmbeddingKind::visual, n,
                                static_cast<std::size_t>(config.visual_dim));
  city.spatial = EmbeddingMatrix(EmbeddingKind::spatial, n,
                                 static_cast<std::size_t>(config.spatial_dim));

  // Random Fourier features of (x, y): cos(w.p + b) with w ~ N(0, 1/bw^2)
  // approximates a Gaussian kernel of width bw, so nearby trees get high
  // cosine similarity after row normalization.
  const std::size_t rff_dim = static_cast<std::size_t>(config.spatial_dim);
  std::vector<double> wx(rff_dim), wy(rff_dim), wb(rff_dim);
  for (std::size_t k = 0; k < rff_dim; ++k) {
    wx[k] = rff_rng.normal() / config.spatial_bandwidth_m;
    wy[k] = rff_rng.normal() / config.spatial_bandwidth_m;
    wb[k] = rff_rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  char id_buf[32];
  std::vector<double> vis(static_cast<std::size_t>(config.visual_dim));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& t = trees[i];
    TreeRecord r;
    std::snprintf(id_buf, sizeof(id_buf), "t%06zu", i);
    r.tree_id = id_buf;
    const auto [lat, lon] = to_lat_lon(t.x, t.y);
    r.lat = lat;
    r.lon = lon;
    std::snprintf(id_buf, sizeof(id_buf), "g%02d", t.genus);
    r.genus = id_buf;
    city.records.push_back(std::move(r));

    // Isotropic Gaussian noise of total magnitude sigma (per-component sd
    // sigma/sqrt(d)), so the perturbation level does not depend on the
    // embedding dimension.
    const double component_sigma =
        config.visual_noise_sigma / std::sqrt(static_cast<double>(vis.size()));
    const auto& dir = dirs[static_cast<std::size_t>(t.genus)];
    double norm = 0.0;
    for (std::size_t j = 0; j < vis.size(); ++j) {
      vis[j] = dir[j] + component_sigma * visual_rng.normal();
      norm += vis[j] * vis[j];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw InvariantError("degenerate visual embedding");
    for (std::size_t j = 0; j < vis.size(); ++j) {
      city.visual.at(i, j) = quantize(vis[j] / norm);
    }

    double snorm = 0.0;
    auto srow = city.spatial.row(i);
    for (std::size_t k = 0; k < rff_dim; ++k) {
      const double z = std::cos(wx[k] * t.x + wy[k] * t.y + wb[k]);
      srow[k] = z;
      snorm += z * z;
    }
    snorm = std::sqrt(snorm);
    if (snorm < 1e-12) throw InvariantError("degenerate spatial embedding");
    for (std::size_t k = 0; k < rff_dim; ++k) {
      srow[k] = quantize(srow[k] / snorm);
    }
  }

  city.grid = GridSpec::from_records(city.records, config.cell_size_m);
  return city;
}

Dataset SynthCity::to_dataset() const {
  return Dataset::assemble(records, visual, spatial, grid.cell_size_m);
}

DiversityField oracle_diversity(const std::vector<TreeRecord>& records,
                                const GridSpec& spec) {
  std::map<CellId, std::map<std::string, long long>> counts;
  for (const auto& r : records) {
    if (!r.genus) {
      throw MissingGenusError("oracle needs genus on every record");
    }
    ++counts[cell_of(r.lat, r.lon, spec)][*r.genus];
  }

  // Rearranged closed forms on integer counts:
  //   H = ln N - (sum c ln c) / N, Simpson = 1 - (sum c^2) / N^2.
  DiversityField field;
  double max_shannon = 0.0;
  for (const auto& [cell, taxa] : counts) {
    long long total = 0;
    long long sum_sq = 0;
    double sum_clnc = 0.0;
    for (const auto& [genus, c] : taxa) {
      total += c;
      sum_sq += c * c;
      sum_clnc += static_cast<double>(c) * std::log(static_cast<double>(c));
    }
    CellDiversity d;
    d.richness = static_cast<int>(taxa.size());
    const double nt = static_cast<double>(total);
    // Monoculture cells are exactly zero; the rearranged formula would
    // otherwise leave a one-ulp residue that corrupts normalization.
    d.shannon = taxa.size() == 1
                    ? 0.0
                    : std::max(std::log(nt) - sum_clnc / nt, 0.0);
    d.simpson = 1.0 - static_cast<double>(sum_sq) / (nt * nt);
    d.evenness = d.richness > 1
                     ? d.shannon / std::log(static_cast<double>(d.richness))
                     : 0.0;
    max_shannon = std::max(max_shannon, d.shannon);
    field.cells.emplace(cell, d);
  }
  if (max_shannon > 0.0) {
    for (auto& [cell, d] : field.cells) d.shannon_norm = d.shannon / max_shannon;
  }
  return field;
}

void plant_visual_outliers(SynthCity& city, double frac, std::uint64_t seed) {
  if (frac < 0.0 || frac > 1.0) throw InvariantError("outlier frac in [0, 1]");
  const std::size_t n = city.records.size();
  const std::size_t k =
      static_cast<std::size_t>(std::floor(frac * static_cast<double>(n)));
  if (k == 0) return;
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  const int dim = static_cast<int>(city.visual.cols());
  for (std::size_t i = 0; i < k; ++i) {
    const auto v = random_unit_vector(rng, dim);
    auto row = city.visual.row(order[i]);
    for (std::size_t j = 0; j < v.size(); ++j) row[j] = quantize(v[j]);
  }
}

std::string SynthConfig::to_json() const {
  nlohmann::json j;
  j["n_genera"] = n_genera;
  j["n_trees"] = n_trees;
  j["n_streets"] = n_streets;
  j["street_length_m"] = street_length_m;
  j["tree_spacing_mean_m"] = tree_spacing_mean_m;
  j["tree_spacing_jitter_m"] = tree_spacing_jitter_m;
  j["dominance_exponent"] = dominance_exponent;
  j["visual_dim"] = visual_dim;
  j["visual_noise_sigma"] = visual_noise_sigma;
  j["min_genus_angle_deg"] = min_genus_angle_deg;
  j["spatial_dim"] = spatial_dim;
  j["spatial_bandwidth_m"] = spatial_bandwidth_m;
  j["cell_size_m"] = cell_size_m;
  j["seed"] = seed;
  return j.dump(2);
}

SynthConfig SynthConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("bad synth config JSON: ") + e.what());
  }
  SynthConfig c;
  try {
    if (j.contains("n_genera")) c.n_genera = j["n_genera"];
    if (j.contains("n_trees")) c.n_trees = j["n_trees"];
    if (j.contains("n_streets")) c.n_streets = j["n_streets"];
    if (j.contains("street_length_m")) c.street_length_m = j["street_length_m"];
    if (j.contains("tree_spacing_mean_m")) {
      c.tree_spacing_mean_m = j["tree_spacing_mean_m"];
    }
    if (j.contains("tree_spacing_jitter_m")) {
      c.tree_spacing_jitter_m = j["tree_spacing_jitter_m"];
    }
    if (j.contains("dominance_exponent")) {
      c.dominance_exponent = j["dominance_exponent"];
    }
    if (j.contains("visual_dim")) c.visual_dim = j["visual_dim"];
    if (j.contains("visual_noise_sigma")) {
      c.visual_noise_sigma = j["visual_noise_sigma"];
    }
    if (j.contains("min_genus_angle_deg")) {
      c.min_genus_angle_deg = j["min_genus_angle_deg"];
    }
    if (j.contains("spatial_dim")) c.spatial_dim = j["spatial_dim"];
    if (j.contains("spatial_bandwidth_m")) {
      c.spatial_bandwidth_m = j["spatial_bandwidth_m"];
    }
    if (j.contains("cell_size_m")) c.cell_size_m = j["cell_size_m"];
    if (j.contains("seed")) c.seed = j["seed"];
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("bad synth config value: ") + e.what());
  }
  return c;
}

}  // namespace canopy
