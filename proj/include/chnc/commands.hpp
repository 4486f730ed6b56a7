#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chnc/chnc.hpp"
#include "chnc/confidence.hpp"
#include "chnc/dataset.hpp"
#include "chnc/error.hpp"
#include "chnc/eval.hpp"
#include "chnc/json_io.hpp"
#include "chnc/pipeline.hpp"
#include "chnc/random.hpp"
#include "chnc/simgraph.hpp"

namespace chnc {

namespace fs = std::filesystem;

inline std::string layout_name(CentroidLayout l) {
  return l == CentroidLayout::hypercube ? "hypercube" : "polytope";
}

inline CentroidLayout parse_layout(const std::string& s) {
  if (s == "hypercube") return CentroidLayout::hypercube;
  if (s == "polytope") return CentroidLayout::polytope;
  config_error("unknown centroid layout '" + s + "' (expected hypercube or polytope)");
}

// ---------------------------------------------------------------- gen

struct GenConfig {
  SyntheticConfig synthetic;
  std::string out;
  bool force = false;
};

inline std::string truth_path_for(const std::string& csv) { return csv + ".truth.csv"; }

/// Writes the synthetic dataset CSV (all rows labeled) and an id,label truth
/// sidecar next to it.
inline void cmd_gen(const GenConfig& cfg, std::ostream& log) {
  if (cfg.out.empty()) config_error("--out is required");
  const std::string truth = truth_path_for(cfg.out);
  if (!cfg.force && (fs::exists(cfg.out) || fs::exists(truth)))
    config_error("refusing to overwrite " + cfg.out + " (use --force)");
  const Dataset ds = generate_synthetic(cfg.synthetic);
  const fs::path parent = fs::path(cfg.out).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  write_csv(ds, cfg.out);
  write_truth(ds, truth);
  log << "wrote " << ds.n << " samples x " << ds.n_features << " features to " << cfg.out << "\n";
}

// ---------------------------------------------------------------- run

struct RunConfig {
  std::optional<std::string> input;
  std::optional<std::string> truth;
  std::string label_column = "label";
  SyntheticConfig synthetic;  // used when input is unset; seed derived from the master seed
  double labeled_fraction = 0.8;
  double noise_rate = 0.2;
  PipelineConfig pipeline;
  std::string out;
  bool force = false;
  bool export_graph = false;

  void validate() const {
    if (out.empty()) config_error("--out is required");
    if (!(labeled_fraction > 0.0 && labeled_fraction < 1.0))
      config_error("labeled fraction must lie in (0, 1)");
    if (!(noise_rate >= 0.0 && noise_rate < 1.0)) config_error("noise rate must lie in [0, 1)");
    if (truth && !input) config_error("--truth needs --input");
    pipeline.validate();
  }
};

inline json manifest_json(const RunConfig& cfg) {
  const auto& p = cfg.pipeline;
  json m;
  m["format"] = "chnc-run-manifest";
  m["version"] = 1;
  m["input"] = cfg.input ? json(*cfg.input) : json(nullptr);
  m["truth"] = cfg.truth ? json(*cfg.truth) : json(nullptr);
  m["label_column"] = cfg.label_column;
  m["synthetic"] = {{"n_samples", cfg.synthetic.n_samples},
                    {"n_features", cfg.synthetic.n_features},
                    {"pos_fraction", cfg.synthetic.pos_fraction},
                    {"clusters_per_class", cfg.synthetic.clusters_per_class},
                    {"class_sep", cfg.synthetic.class_sep},
                    {"layout", layout_name(cfg.synthetic.layout)}};
  m["labeled_fraction"] = cfg.labeled_fraction;
  m["noise_rate"] = cfg.noise_rate;
  m["k"] = p.k ? json(*p.k) : json(nullptr);
  m["sigma"] = p.sigma ? json(*p.sigma) : json(nullptr);
  m["lambda_grid"] = {{"min", p.grid.min}, {"max", p.grid.max}, {"step", p.grid.step}};
  m["cv_folds"] = p.cv_folds;
  m["n_trees"] = p.n_trees;
  m["leaf_fractions"] = p.leaf_fractions;
  m["standardize"] = p.standardize;
  m["seed"] = p.seed;
  m["export_graph"] = cfg.export_graph;
  return m;
}

namespace detail {

template <typename T>
T manifest_get(const json& m, const char* key) {
  if (!m.contains(key)) data_error(std::string("manifest: missing field '") + key + "'");
  try {
    return m.at(key).get<T>();
  } catch (const json::exception&) {
    data_error(std::string("manifest: field '") + key + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> manifest_opt(const json& m, const char* key) {
  if (!m.contains(key) || m.at(key).is_null()) return std::nullopt;
  return manifest_get<T>(m, key);
}

}  // namespace detail

/// Rebuilds the run configuration stored by manifest_json. Output location
/// and overwrite policy are not part of the manifest.
inline RunConfig run_config_from_manifest(const json& m) {
  using detail::manifest_get;
  using detail::manifest_opt;
  if (!m.is_object() || m.value("format", "") != "chnc-run-manifest")
    data_error("not a run manifest");
  if (manifest_get<int>(m, "version") != 1) data_error("unsupported manifest version");
  RunConfig cfg;
  cfg.input = manifest_opt<std::string>(m, "input");
  cfg.truth = manifest_opt<std::string>(m, "truth");
  cfg.label_column = manifest_get<std::string>(m, "label_column");
  const json syn = manifest_get<json>(m, "synthetic");
  cfg.synthetic.n_samples = manifest_get<std::size_t>(syn, "n_samples");
  cfg.synthetic.n_features = manifest_get<std::size_t>(syn, "n_features");
  cfg.synthetic.pos_fraction = manifest_get<double>(syn, "pos_fraction");
  cfg.synthetic.clusters_per_class = manifest_get<std::size_t>(syn, "clusters_per_class");
  cfg.synthetic.class_sep = manifest_get<double>(syn, "class_sep");
  cfg.synthetic.layout = parse_layout(manifest_get<std::string>(syn, "layout"));
  cfg.labeled_fraction = manifest_get<double>(m, "labeled_fraction");
  cfg.noise_rate = manifest_get<double>(m, "noise_rate");
  auto& p = cfg.pipeline;
  p.k = manifest_opt<std::size_t>(m, "k");
  p.sigma = manifest_opt<double>(m, "sigma");
  const json grid = manifest_get<json>(m, "lambda_grid");
  p.grid = {manifest_get<double>(grid, "min"), manifest_get<double>(grid, "max"),
            manifest_get<double>(grid, "step")};
  p.cv_folds = manifest_get<std::size_t>(m, "cv_folds");
  p.n_trees = manifest_get<std::size_t>(m, "n_trees");
  p.leaf_fractions = manifest_get<std::vector<double>>(m, "leaf_fractions");
  p.standardize = manifest_get<bool>(m, "standardize");
  p.seed = manifest_get<std::uint64_t>(m, "seed");
  cfg.export_graph = m.value("export_graph", false);
  return cfg;
}

/// Dataset as seen by the classifier: loaded or generated, then (when every
/// row is labeled) split into L/U and corrupted with label noise.
inline Dataset prepare_dataset(const RunConfig& cfg, bool& split_applied) {
  const std::uint64_t seed = cfg.pipeline.seed;
  Dataset ds = with_stage("load", [&] {
    if (cfg.input) {
      Dataset d = load_csv(*cfg.input, cfg.label_column);
      if (cfg.truth) load_truth(d, *cfg.truth);
      d.recompute_noise_flags();
      return d;
    }
    SyntheticConfig sc = cfg.synthetic;
    sc.seed = derive_seed(seed, "synthetic");
    return generate_synthetic(sc);
  });
  split_applied = ds.count(Role::unlabeled) == 0;
  if (!split_applied) return ds;
  return with_stage("split", [&] {
    Dataset d = split_labeled_unlabeled(ds, cfg.labeled_fraction, derive_seed(seed, "split"));
    if (cfg.noise_rate > 0.0) d = inject_noise(d, cfg.noise_rate, derive_seed(seed, "noise"));
    return d;
  });
}

inline MetricsReport evaluate_run(const Dataset& ds, const ChncResult& r) {
  MetricsReport m;
  m.n_test = r.unlabeled.size();
  m.n_detected = r.detected_noisy.size();
  if (!ds.has_truth() || r.unlabeled.empty()) return m;
  std::vector<int> truth;
  for (int v : r.unlabeled) truth.push_back(ds.true_label[static_cast<std::size_t>(v)]);
  m.accuracy = accuracy(r.predictions, truth);
  const bool both = std::find(truth.begin(), truth.end(), 1) != truth.end() &&
                    std::find(truth.begin(), truth.end(), -1) != truth.end();
  if (both) m.balanced_accuracy = balanced_accuracy(r.predictions, truth);
  std::vector<int> noisy;
  for (std::size_t i = 0; i < ds.n; ++i)
    if (!ds.noisy.empty() && ds.noisy[i]) noisy.push_back(static_cast<int>(i));
  m.n_noisy = noisy.size();
  m.noise = noise_prf(r.detected_noisy, noisy);
  return m;
}

inline json predictions_json(const ChncResult& r) {
  json j;
  j["lambda_star"] = r.lambda_star;
  json preds = json::array();
  for (std::size_t a = 0; a < r.unlabeled.size(); ++a)
    preds.push_back({{"id", r.unlabeled[a]}, {"label", r.predictions[a]}});
  j["predictions"] = std::move(preds);
  j["detected_noisy"] = r.detected_noisy;
  json table = json::array();
  for (const auto& e : r.cv_table) table.push_back({{"lambda", e.lambda}, {"acc", e.acc}});
  j["cv_table"] = std::move(table);
  return j;
}

inline json metrics_json(const Dataset& ds, const MetricsReport& m, const PipelineResult& p) {
  json j;
  const bool truth = ds.has_truth() && m.n_test > 0;
  j["accuracy"] = truth ? json(m.accuracy) : json(nullptr);
  j["balanced_accuracy"] = m.balanced_accuracy ? json(*m.balanced_accuracy) : json(nullptr);
  j["noise_recall"] = truth ? json(m.noise.recall) : json(nullptr);
  j["noise_precision"] = truth ? json(m.noise.precision) : json(nullptr);
  j["noise_f1"] = truth ? json(m.noise.f1) : json(nullptr);
  j["n_samples"] = ds.n;
  j["n_labeled"] = ds.n - ds.count(Role::unlabeled);
  j["n_test"] = m.n_test;
  j["n_noisy"] = m.n_noisy;
  j["n_detected"] = m.n_detected;
  j["lambda_star"] = p.result.lambda_star;
  j["theta"] = p.confidence.theta;
  j["leaf_fraction"] = p.leaf_fraction;
  j["k"] = p.k;
  j["sigma"] = p.sigma;
  j["n_edges"] = p.graph.edges.size();
  j["warnings"] = p.confidence.warnings;
  return j;
}

struct RunOutcome {
  Dataset dataset;
  PipelineResult pipeline;
  MetricsReport metrics;
};

/// Runs the pipeline and writes predictions.json, confidence.csv,
/// metrics.json, importances.json and manifest.json into cfg.out.
inline RunOutcome cmd_run(const RunConfig& cfg, std::ostream& log) {
  cfg.validate();
  const fs::path dir(cfg.out);
  if (fs::exists(dir / "predictions.json") && !cfg.force)
    config_error("refusing to overwrite results in " + cfg.out + " (use --force)");
  if (cfg.input && !fs::exists(*cfg.input)) data_error("input file not found: " + *cfg.input);

  RunOutcome o;
  bool split_applied = false;
  o.dataset = prepare_dataset(cfg, split_applied);
  o.pipeline = run_pipeline(o.dataset, cfg.pipeline);
  o.metrics = evaluate_run(o.dataset, o.pipeline.result);
  for (const auto& w : o.pipeline.confidence.warnings) log << "warning: " << w << "\n";

  with_stage("write", [&] {
    fs::create_directories(dir);
    write_json(predictions_json(o.pipeline.result), (dir / "predictions.json").string());
    write_confidence_csv(o.pipeline.confidence, (dir / "confidence.csv").string());
    write_json(metrics_json(o.dataset, o.metrics, o.pipeline), (dir / "metrics.json").string());
    json imp;
    imp["leaf_fraction"] = o.pipeline.leaf_fraction;
    imp["rho"] = o.pipeline.importances.rho;
    write_json(imp, (dir / "importances.json").string());
    RunConfig resolved = cfg;
    if (resolved.input) resolved.input = fs::absolute(*resolved.input).lexically_normal().string();
    if (resolved.truth) resolved.truth = fs::absolute(*resolved.truth).lexically_normal().string();
    json manifest = manifest_json(resolved);
    manifest["split_applied"] = split_applied;
    write_json(manifest, (dir / "manifest.json").string());
    if (cfg.export_graph) write_edge_list(o.pipeline.graph, (dir / "graph.txt").string());
  });

  log << "lambda* = " << o.pipeline.result.lambda_star << "\n";
  if (o.dataset.has_truth() && o.metrics.n_test > 0)
    log << "accuracy = " << fixed(o.metrics.accuracy) << ", noise F1 = " << fixed(o.metrics.noise.f1)
        << "\n";
  log << "results in " << cfg.out << "\n";
  return o;
}

// ---------------------------------------------------------------- compare

struct CompareRow {
  std::string run;
  double accuracy = 0.0;
  std::optional<double> balanced_accuracy;
  std::optional<double> noise_f1;
  double gap_from_max_pct = 0.0;
  double improvement_pct = 0.0;  // first run over this run
};

inline std::vector<CompareRow> compare_runs(const std::vector<std::string>& dirs) {
  if (dirs.empty()) config_error("compare needs at least one result directory");
  std::vector<CompareRow> rows;
  for (const auto& d : dirs) {
    const fs::path path = fs::path(d) / "metrics.json";
    if (!fs::exists(path)) data_error("missing metrics.json in " + d);
    const json m = read_json(path.string());
    if (!m.is_object() || !m.contains("accuracy"))
      data_error(path.string() + ": schema mismatch (no accuracy field)");
    if (!m["accuracy"].is_number())
      data_error(path.string() + ": run has no accuracy (no ground truth available)");
    CompareRow r;
    r.run = d;
    r.accuracy = m["accuracy"].get<double>();
    if (m.contains("balanced_accuracy") && m["balanced_accuracy"].is_number())
      r.balanced_accuracy = m["balanced_accuracy"].get<double>();
    if (m.contains("noise_f1") && m["noise_f1"].is_number()) r.noise_f1 = m["noise_f1"].get<double>();
    rows.push_back(r);
  }
  std::vector<std::vector<double>> scores;
  for (const auto& r : rows) scores.push_back({r.accuracy});
  const auto gaps = avg_gap_from_max(scores);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].gap_from_max_pct = gaps[k];
    rows[k].improvement_pct =
        rows[k].accuracy > 0.0 ? accuracy_improvement(rows.front().accuracy, rows[k].accuracy) : 0.0;
  }
  return rows;
}

inline std::string compare_table(const std::vector<CompareRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? fixed(*v) : std::string("-"); };
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows)
    cells.push_back({r.run, fixed(r.accuracy), opt(r.balanced_accuracy), opt(r.noise_f1),
                     fixed(r.gap_from_max_pct, 2), fixed(r.improvement_pct, 2)});
  return format_table({"run", "accuracy", "balanced_acc", "noise_f1", "gap_from_max_%",
                       "first_vs_run_%"},
                      cells);
}

inline json compare_json(const std::vector<CompareRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"run", r.run},
                   {"accuracy", r.accuracy},
                   {"balanced_accuracy", r.balanced_accuracy ? json(*r.balanced_accuracy) : json(nullptr)},
                   {"noise_f1", r.noise_f1 ? json(*r.noise_f1) : json(nullptr)},
                   {"gap_from_max_pct", r.gap_from_max_pct},
                   {"improvement_pct", r.improvement_pct}});
  }
  return arr;
}

}  // namespace chnc
