#include "canopy/pipeline.hpp"

#include <nlohmann/json.hpp>

#include "canopy/error.hpp"
#include "canopy/similarity.hpp"

namespace canopy {

Dataset Dataset::assemble(std::vector<TreeRecord> records,
                          EmbeddingMatrix visual, EmbeddingMatrix spatial,
                          double cell_size_m) {
  if (visual.rows() != records.size() || spatial.rows() != records.size()) {
    throw InvariantError("embedding row count does not match record count");
  }
  Dataset d;
  d.records = std::move(records);
  d.visual = std::move(visual);
  d.spatial = std::move(spatial);
  d.grid = GridSpec::from_records(d.records, cell_size_m);
  d.cells = assign_grid(d.records, d.grid);
  return d;
}

void validate_params(const PipelineParams& params) {
  const auto& r = params.refine;
  auto check = [](bool ok, const char* what) {
    if (!ok) throw InvariantError(std::string("parameter out of range: ") + what);
  };
  check(r.outlier_frac >= 0.1 && r.outlier_frac <= 0.3, "outlier_frac");
  check(params.min_cluster_size >= 2 && params.min_cluster_size <= 10,
        "min_cluster_size");
  check(params.min_samples >= 1 && params.min_samples <= 10, "min_samples");
  check(r.sim_thresh_merge >= 0.5 && r.sim_thresh_merge <= 0.9,
        "sim_thresh_merge");
  check(r.sim_thresh_outliers >= 0.5 && r.sim_thresh_outliers <= 0.9,
        "sim_thresh_outliers");
  check(r.sim_thresh_reassign >= 0.5 && r.sim_thresh_reassign <= 0.9,
        "sim_thresh_reassign");
  check(r.n_iter >= 0 && r.n_iter <= 6, "n_iter");
}

Pipeline::Pipeline(const Dataset& dataset)
    : dataset_(&dataset),
      visual_unit_(normalize_rows(dataset.visual)),
      spatial_unit_(normalize_rows(dataset.spatial)) {}

const DistanceMatrix& Pipeline::spatial_distances() const {
  if (!spatial_dist_) spatial_dist_ = cosine_distance_matrix(spatial_unit_);
  return *spatial_dist_;
}

ClusterLabels Pipeline::initial_labels(const PipelineParams& params) const {
  return hdbscan(spatial_distances(), params.min_cluster_size,
                 params.min_samples);
}

PipelineResult Pipeline::run(const PipelineParams& params) const {
  PipelineResult result;
  result.initial = initial_labels(params);
  auto refined = refine(result.initial, visual_unit_, params.refine);
  result.pre_promotion = std::move(refined.pre_promotion);
  result.post_last_elimination = std::move(refined.post_last_elimination);
  result.labels = std::move(refined.labels);
  result.trace = std::move(refined.trace);
  return result;
}

PipelineResult Pipeline::run_random_elimination(const PipelineParams& params,
                                                std::uint64_t seed) const {
  PipelineResult result;
  result.initial = initial_labels(params);
  auto refined = refine_random_elimination(result.initial, visual_unit_,
                                           params.refine, seed);
  result.pre_promotion = std::move(refined.pre_promotion);
  result.post_last_elimination = std::move(refined.post_last_elimination);
  result.labels = std::move(refined.labels);
  result.trace = std::move(refined.trace);
  return result;
}

std::string PipelineParams::to_json() const {
  nlohmann::json j;
  j["min_cluster_size"] = min_cluster_size;
  j["min_samples"] = min_samples;
  j["outlier_frac"] = refine.outlier_frac;
  j["sim_thresh_merge"] = refine.sim_thresh_merge;
  j["sim_thresh_outliers"] = refine.sim_thresh_outliers;
  j["sim_thresh_reassign"] = refine.sim_thresh_reassign;
  j["n_iter"] = refine.n_iter;
  j["toggles"] = {{"elim", refine.toggles.elim},
                  {"merge", refine.toggles.merge},
                  {"reassign", refine.toggles.reassign}};
  j["outlier_grouping"] =
      refine.grouping == OutlierGrouping::components ? "components" : "cliques";
  return j.dump(2);
}

PipelineParams PipelineParams::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("bad config JSON: ") + e.what());
  }
  PipelineParams p;
  try {
    if (j.contains("min_cluster_size")) p.min_cluster_size = j["min_cluster_size"];
    if (j.contains("min_samples")) p.min_samples = j["min_samples"];
    if (j.contains("outlier_frac")) p.refine.outlier_frac = j["outlier_frac"];
    if (j.contains("sim_thresh_merge")) {
      p.refine.sim_thresh_merge = j["sim_thresh_merge"];
    }
    if (j.contains("sim_thresh_outliers")) {
      p.refine.sim_thresh_outliers = j["sim_thresh_outliers"];
    }
    if (j.contains("sim_thresh_reassign")) {
      p.refine.sim_thresh_reassign = j["sim_thresh_reassign"];
    }
    if (j.contains("n_iter")) p.refine.n_iter = j["n_iter"];
    if (j.contains("toggles")) {
      const auto& t = j["toggles"];
      if (t.contains("elim")) p.refine.toggles.elim = t["elim"];
      if (t.contains("merge")) p.refine.toggles.merge = t["merge"];
      if (t.contains("reassign")) p.refine.toggles.reassign = t["reassign"];
    }
    if (j.contains("outlier_grouping")) {
      const std::string mode = j["outlier_grouping"];
      if (mode == "components") {
        p.refine.grouping = OutlierGrouping::components;
      } else if (mode == "cliques") {
        p.refine.grouping = OutlierGrouping::cliques;
      } else {
        throw IngestError("unknown outlier_grouping '" + mode + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IngestError(std::string("bad config value: ") + e.what());
  }
  return p;
}

}  // namespace canopy
