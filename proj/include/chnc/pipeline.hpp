#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chnc/chnc.hpp"
#include "chnc/confidence.hpp"
#include "chnc/dataset.hpp"
#include "chnc/error.hpp"
#include "chnc/forest.hpp"
#include "chnc/hnc_graphs.hpp"
#include "chnc/random.hpp"
#include "chnc/simgraph.hpp"

namespace chnc {

struct PipelineConfig {
  std::optional<std::size_t> k;     // default_k(n) when unset
  std::optional<double> sigma;      // default_sigma(n) when unset
  LambdaGridSpec grid;
  std::size_t cv_folds = 5;
  std::size_t n_trees = 100;
  std::vector<double> leaf_fractions = {0.001, 0.002, 0.005, 0.01};
  bool standardize = true;
  std::uint64_t seed = 0;

  void validate() const {
    grid.validate();
    if (cv_folds < 2) config_error("cv_folds must be >= 2");
    if (k && *k < 1) config_error("k must be >= 1");
    if (sigma && !(*sigma > 0.0)) config_error("sigma must be > 0");
    ForestConfig f;
    f.n_trees = n_trees;
    f.candidate_fractions = leaf_fractions;
    f.validate();
  }
};

struct PipelineResult {
  double leaf_fraction = 0.0;
  ImportanceVector importances;
  std::size_t k = 0;
  double sigma = 0.0;
  SimilarityGraph graph;
  ConfidenceReport confidence;
  ChncResult result;
};

/// standardize -> forest -> importances -> kNN graph -> confidences ->
/// lambda selection -> CHNC cut. Errors carry the failing stage as a prefix.
inline PipelineResult run_pipeline(const Dataset& raw, const PipelineConfig& cfg) {
  cfg.validate();
  raw.check_invariants();
  raw.require_classifiable();

  PipelineResult out;
  const Dataset ds = with_stage("standardize", [&] {
    return cfg.standardize ? standardize(raw) : raw;
  });

  with_stage("forest", [&] {
    const TrainingSet train = labeled_training_set(ds);
    ForestConfig fc;
    fc.n_trees = cfg.n_trees;
    fc.candidate_fractions = cfg.leaf_fractions;
    fc.cv_folds = cfg.cv_folds;
    fc.seed = derive_seed(cfg.seed, "leaf-tuning");
    out.leaf_fraction = tune_leaf_fraction(train, fc);
    fc.min_samples_leaf_fraction = out.leaf_fraction;
    fc.seed = derive_seed(cfg.seed, "forest");
    out.importances = feature_importances(fit_forest(train, fc));
  });

  out.k = cfg.k.value_or(default_k(ds.n));
  out.sigma = cfg.sigma.value_or(default_sigma(ds.n));
  out.graph = with_stage("graph", [&] { return build_knn_graph(ds, out.importances, out.k, out.sigma); });

  const SeedSpec seeds = SeedSpec::from_dataset(ds);
  const std::vector<double> grid = cfg.grid.values();
  out.confidence = with_stage("confidence", [&] { return compute_confidences(out.graph, seeds, grid); });

  const ConfidenceVector gamma = out.confidence.gamma();
  const LambdaSelection sel = with_stage("lambda-selection", [&] {
    return select_lambda(out.graph, seeds, gamma, grid, cfg.cv_folds, derive_seed(cfg.seed, "cv"));
  });
  out.result = with_stage("chnc", [&] { return fit_predict(out.graph, seeds, gamma, sel.lambda_star); });
  out.result.cv_table = sel.cv_table;
  return out;
}

}  // namespace chnc
