// canopy CLI: synthetic-city generation, clustering, evaluation, tuning, and
// ablation over tree inventories with visual/spatial embeddings.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "canopy/corpus.hpp"
#include "canopy/error.hpp"
#include "canopy/evaluate.hpp"
#include "canopy/pipeline.hpp"
#include "canopy/synth.hpp"
#include "canopy/tune.hpp"

namespace fs = std::filesystem;
using namespace canopy;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitIngest = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitMissingGenus = 4;

// All outputs go through temp-file + rename so a failed run leaves nothing
// partial behind.
void write_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IngestError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw IngestError("failed writing '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CommonArgs {
  std::string trees;
  std::string visual_emb;
  std::string spatial_emb;
  double cell_size = 500.0;
  std::string config;
  std::string toggles;
  std::uint64_t seed = 42;
  std::string out_dir;
  bool unchecked = false;
};

void add_input_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--trees", args.trees, "Tree CSV (tree_id,lat,lon[,genus])")
      ->required();
  cmd->add_option("--visual-emb", args.visual_emb, "Visual EMB1 file")
      ->required();
  cmd->add_option("--spatial-emb", args.spatial_emb, "Spatial EMB1 file")
      ->required();
  cmd->add_option("--cell-size", args.cell_size, "Grid cell size in meters")
      ->default_val(500.0);
  cmd->add_option("--config", args.config, "Pipeline parameter JSON");
  cmd->add_option("--toggles", args.toggles,
                  "Enabled refine stages, e.g. elim,merge,reassign or none");
  cmd->add_option("--seed", args.seed, "Seed for all randomness")
      ->default_val(42);
  cmd->add_option("--out", args.out_dir, "Output directory")->required();
  cmd->add_flag("--unchecked", args.unchecked,
                "Skip the tuned-range parameter check");
}

RefineToggles parse_toggles(const std::string& text) {
  RefineToggles t{false, false, false};
  if (text == "none" || text.empty()) return t;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "elim") {
      t.elim = true;
    } else if (item == "merge") {
      t.merge = true;
    } else if (item == "reassign") {
      t.reassign = true;
    } else {
      throw InvariantError("unknown toggle '" + item + "'");
    }
  }
  return t;
}

PipelineParams resolve_params(const CommonArgs& args) {
  PipelineParams params;
  if (!args.config.empty()) {
    params = PipelineParams::from_json(read_file(args.config));
  }
  if (!args.toggles.empty()) {
    params.refine.toggles = parse_toggles(args.toggles);
  }
  if (!args.unchecked) validate_params(params);
  return params;
}

Dataset load_dataset(const CommonArgs& args) {
  auto records = load_trees(args.trees);
  auto visual =
      load_embeddings(args.visual_emb, records.size(), EmbeddingKind::visual);
  auto spatial =
      load_embeddings(args.spatial_emb, records.size(), EmbeddingKind::spatial);
  return Dataset::assemble(std::move(records), std::move(visual),
                           std::move(spatial), args.cell_size);
}

std::string labels_csv(const Dataset& dataset, const ClusterLabels& labels) {
  std::ostringstream out;
  out << "tree_id,cluster\n";
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    out << dataset.records[i].tree_id << ',' << labels.labels[i] << '\n';
  }
  return out.str();
}

std::vector<int> load_injected_labels(const std::string& path,
                                      const Dataset& dataset) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open labels file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) ||
      (line != "tree_id,cluster" && line != "tree_id,cluster\r")) {
    throw IngestError("labels file needs header tree_id,cluster");
  }
  std::map<std::string, int> by_id;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IngestError("labels row " + std::to_string(row) + ": no comma");
    }
    const std::string id = line.substr(0, comma);
    int cluster = 0;
    try {
      cluster = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw IngestError("labels row " + std::to_string(row) + ": bad cluster");
    }
    if (cluster < 0) {
      throw IngestError("labels row " + std::to_string(row) +
                        ": noise labels are not evaluable");
    }
    by_id[id] = cluster;
  }
  std::vector<int> labels;
  labels.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    const auto it = by_id.find(r.tree_id);
    if (it == by_id.end()) {
      throw IngestError("labels file misses tree_id '" + r.tree_id + "'");
    }
    labels.push_back(it->second);
  }
  return labels;
}

std::string joined_cells_csv(const DiversityField& pred,
                             const DiversityField& truth) {
  std::ostringstream out;
  out << "ix,iy,pred_richness,pred_shannon,pred_shannon_norm,pred_simpson,"
         "pred_evenness,true_richness,true_shannon,true_shannon_norm,"
         "true_simpson,true_evenness\n";
  char buf[320];
  auto it_p = pred.cells.begin();
  for (const auto& [cell, t] : truth.cells) {
    const auto& p = it_p->second;
    std::snprintf(buf, sizeof(buf),
                  "%lld,%lld,%d,%.9g,%.9g,%.9g,%.9g,%d,%.9g,%.9g,%.9g,%.9g\n",
                  static_cast<long long>(cell.ix),
                  static_cast<long long>(cell.iy), p.richness, p.shannon,
                  p.shannon_norm, p.simpson, p.evenness, t.richness, t.shannon,
                  t.shannon_norm, t.simpson, t.evenness);
    out << buf;
    ++it_p;
  }
  return out.str();
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Unsupervised urban-tree diversity mapping"};
  app.require_subcommand(1);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic city");
  std::string synth_config_path;
  std::string synth_out;
  std::optional<std::uint64_t> synth_seed;
  synth_cmd->add_option("--config", synth_config_path, "Synth config JSON");
  synth_cmd->add_option("--seed", synth_seed, "Override the config seed");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();

  // cluster
  auto* cluster_cmd =
      app.add_subcommand("cluster", "Cluster a city into pseudo-taxa");
  CommonArgs cluster_args;
  add_input_flags(cluster_cmd, cluster_args);

  // eval
  auto* eval_cmd =
      app.add_subcommand("eval", "Cluster and score against genus truth");
  CommonArgs eval_args;
  add_input_flags(eval_cmd, eval_args);
  std::string injected_labels;
  int n_perm = 999;
  int bootstrap_b = 1000;
  eval_cmd->add_option("--labels", injected_labels,
                       "Skip clustering; evaluate these labels");
  eval_cmd->add_option("--n-perm", n_perm, "Moran permutations")
      ->default_val(999);
  eval_cmd->add_option("--bootstrap-b", bootstrap_b, "Bootstrap replicates")
      ->default_val(1000);

  // tune
  auto* tune_cmd =
      app.add_subcommand("tune", "Latin-hypercube hyperparameter search");
  CommonArgs tune_args;
  add_input_flags(tune_cmd, tune_args);
  int tune_n = 100;
  tune_cmd->add_option("--n", tune_n, "Number of sampled configs")
      ->default_val(100);

  // ablate
  auto* ablate_cmd =
      app.add_subcommand("ablate", "Run the 8-arm stage-toggle ablation");
  CommonArgs ablate_args;
  add_input_flags(ablate_cmd, ablate_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (synth_cmd->parsed()) {
    SynthConfig config;
    if (!synth_config_path.empty()) {
      config = SynthConfig::from_json(read_file(synth_config_path));
    }
    if (synth_seed) config.seed = *synth_seed;
    const SynthCity city = generate_city(config);
    fs::create_directories(synth_out);
    const fs::path dir(synth_out);

    save_trees(city.records, (dir / "trees.csv.tmp").string());
    fs::rename(dir / "trees.csv.tmp", dir / "trees.csv");
    save_embeddings(city.visual, (dir / "visual.emb.tmp").string());
    fs::rename(dir / "visual.emb.tmp", dir / "visual.emb");
    save_embeddings(city.spatial, (dir / "spatial.emb.tmp").string());
    fs::rename(dir / "spatial.emb.tmp", dir / "spatial.emb");
    write_atomic(dir / "synth_config.json", config.to_json());
    std::cout << "wrote " << city.records.size() << " trees to " << synth_out
              << "\n";
    return kExitOk;
  }

  if (cluster_cmd->parsed()) {
    const PipelineParams params = resolve_params(cluster_args);
    const Dataset dataset = load_dataset(cluster_args);
    const Pipeline pipeline(dataset);
    const PipelineResult result = pipeline.run(params);
    fs::create_directories(cluster_args.out_dir);
    const fs::path dir(cluster_args.out_dir);
    write_atomic(dir / "labels.csv", labels_csv(dataset, result.labels));
    write_atomic(dir / "refine_trace.json", result.trace.to_json());
    std::cout << "clustered " << dataset.records.size() << " trees into "
              << result.labels.num_clusters << " pseudo-taxa\n";
    return kExitOk;
  }

  if (eval_cmd->parsed()) {
    const Dataset dataset = load_dataset(eval_args);
    const auto [genus_ids, genus_names] = genus_taxon_ids(dataset.records);

    std::vector<int> pred;
    std::optional<PipelineResult> run;
    if (!injected_labels.empty()) {
      pred = load_injected_labels(injected_labels, dataset);
    } else {
      const PipelineParams params = resolve_params(eval_args);
      const Pipeline pipeline(dataset);
      run = pipeline.run(params);
      pred = run->labels.labels;
    }

    EvalOptions options;
    options.n_perm = n_perm;
    options.bootstrap_b = bootstrap_b;
    options.seed = eval_args.seed;
    const EvalReport report =
        evaluate_city(dataset.cells, genus_ids, pred, options);

    const DiversityField truth_field = diversity_field(dataset.cells, genus_ids);
    const DiversityField pred_field = diversity_field(dataset.cells, pred);

    fs::create_directories(eval_args.out_dir);
    const fs::path dir(eval_args.out_dir);
    if (run) {
      write_atomic(dir / "labels.csv",
                   labels_csv(dataset, run->labels));
      write_atomic(dir / "refine_trace.json", run->trace.to_json());
    }
    write_atomic(dir / "eval_report.json", report.to_json());
    write_atomic(dir / "eval_row.csv", EvalReport::csv_header() + "\n" +
                                           report.to_csv_row("city") + "\n");
    write_atomic(dir / "cells.csv", joined_cells_csv(pred_field, truth_field));
    write_atomic(dir / "pred.geojson", pred_field.to_geojson(dataset.grid));
    write_atomic(dir / "truth.geojson", truth_field.to_geojson(dataset.grid));
    std::cout << "v_score " << report.v.point << ", w1_shannon "
              << report.w1_shannon.point << ", w1_simpson "
              << report.w1_simpson.point << "\n";
    return kExitOk;
  }

  if (tune_cmd->parsed()) {
    const Dataset dataset = load_dataset(tune_args);
    const auto [genus_ids, genus_names] = genus_taxon_ids(dataset.records);
    const Pipeline pipeline(dataset);
    const Leaderboard board = tune(pipeline, genus_ids, tune_n, tune_args.seed);
    fs::create_directories(tune_args.out_dir);
    const fs::path dir(tune_args.out_dir);
    write_atomic(dir / "leaderboard.csv", board.to_csv());
    write_atomic(dir / "best_config.json",
                 board.rows[board.best_index].params.to_json());
    std::cout << "best config " << board.best_index << " score "
              << board.rows[board.best_index].score << "\n";
    return kExitOk;
  }

  if (ablate_cmd->parsed()) {
    const PipelineParams params = resolve_params(ablate_args);
    const Dataset dataset = load_dataset(ablate_args);
    const auto [genus_ids, genus_names] = genus_taxon_ids(dataset.records);
    const Pipeline pipeline(dataset);
    const auto rows = ablate(pipeline, genus_ids, params);
    fs::create_directories(ablate_args.out_dir);
    write_atomic(fs::path(ablate_args.out_dir) / "ablation.csv",
                 ablation_csv(rows));
    std::cout << "wrote " << rows.size() << " ablation rows\n";
    return kExitOk;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const MissingGenusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingGenus;
  } catch (const IngestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIngest;
  } catch (const InvariantError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
