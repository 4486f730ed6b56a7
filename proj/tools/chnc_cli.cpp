#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chnc.hpp"

namespace {

struct Flags {
  chnc::GenConfig gen;
  std::string gen_layout = "hypercube";

  chnc::RunConfig run;
  std::string input, truth, manifest, lambda_grid = "-1:1:0.002", run_layout = "hypercube";
  std::size_t k = 0;
  double sigma = 0.0;
  bool no_standardize = false;

  std::vector<std::string> compare_dirs;
  bool compare_as_json = false;
};

void add_synthetic_flags(CLI::App* cmd, chnc::SyntheticConfig& s, std::string& layout) {
  cmd->add_option("--n-samples", s.n_samples, "number of samples")->capture_default_str();
  cmd->add_option("--n-features", s.n_features, "number of features")->capture_default_str();
  cmd->add_option("--pos-fraction", s.pos_fraction, "fraction of positive samples")
      ->capture_default_str();
  cmd->add_option("--clusters-per-class", s.clusters_per_class, "Gaussian clusters per class")
      ->capture_default_str();
  cmd->add_option("--class-sep", s.class_sep, "centroid distance scale")->capture_default_str();
  cmd->add_option("--layout", layout, "centroid layout: hypercube or polytope")
      ->capture_default_str();
}

int run_gen(Flags& f) {
  f.gen.synthetic.layout = chnc::parse_layout(f.gen_layout);
  chnc::cmd_gen(f.gen, std::cerr);
  return 0;
}

int run_run(Flags& f, CLI::App* cmd) {
  chnc::RunConfig cfg;
  if (!f.manifest.empty()) {
    cfg = chnc::run_config_from_manifest(chnc::read_json(f.manifest));
  } else {
    cfg = f.run;
    cfg.synthetic.layout = chnc::parse_layout(f.run_layout);
    if (!f.input.empty()) cfg.input = f.input;
    if (!f.truth.empty()) cfg.truth = f.truth;
    if (cmd->count("--k")) cfg.pipeline.k = f.k;
    if (cmd->count("--sigma")) cfg.pipeline.sigma = f.sigma;
    cfg.pipeline.grid = chnc::parse_lambda_grid(f.lambda_grid);
    cfg.pipeline.standardize = !f.no_standardize;
  }
  cfg.out = f.run.out;
  cfg.force = f.run.force;
  if (cmd->count("--export-graph")) cfg.export_graph = true;
  chnc::cmd_run(cfg, std::cerr);
  return 0;
}

int run_compare(Flags& f) {
  const auto rows = chnc::compare_runs(f.compare_dirs);
  if (f.compare_as_json)
    std::cout << chnc::dump_json(chnc::compare_json(rows));
  else
    std::cout << chnc::compare_table(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-weighted normalized-cut classification"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("gen", "generate a synthetic Gaussian-blob dataset");
  add_synthetic_flags(gen, f.gen.synthetic, f.gen_layout);
  gen->add_option("--seed", f.gen.synthetic.seed, "random seed")->capture_default_str();
  gen->add_option("--out", f.gen.out, "output CSV path")->required();
  gen->add_flag("--force", f.gen.force, "overwrite existing files");

  auto* run = app.add_subcommand("run", "classify a dataset and flag noisy labels");
  run->add_option("--input", f.input, "dataset CSV (omit for a synthetic dataset)");
  run->add_option("--truth", f.truth, "id,label truth sidecar for --input");
  run->add_option("--label-column", f.run.label_column, "label column name")->capture_default_str();
  add_synthetic_flags(run, f.run.synthetic, f.run_layout);
  run->add_option("--labeled-fraction", f.run.labeled_fraction, "fraction kept labeled")
      ->capture_default_str();
  run->add_option("--noise-rate", f.run.noise_rate, "per-class label flip rate")
      ->capture_default_str();
  run->add_option("--k", f.k, "nearest neighbours (default 15, or 10 from 10000 samples)");
  run->add_option("--sigma", f.sigma, "Gaussian width (default 0.75, or 0.5 from 10000 samples)");
  run->add_option("--lambda-grid", f.lambda_grid, "min:max:step")->capture_default_str();
  run->add_option("--cv-folds", f.run.pipeline.cv_folds, "cross-validation folds")
      ->capture_default_str();
  run->add_option("--n-trees", f.run.pipeline.n_trees, "random forest size")->capture_default_str();
  run->add_option("--leaf-fractions", f.run.pipeline.leaf_fractions,
                  "candidate min_samples_leaf fractions")
      ->delimiter(',')
      ->capture_default_str();
  run->add_flag("--no-standardize", f.no_standardize, "use raw feature values");
  run->add_option("--seed", f.run.pipeline.seed, "master seed")->capture_default_str();
  run->add_option("--out", f.run.out, "output directory")->required();
  run->add_option("--manifest", f.manifest, "replay the configuration of a manifest.json");
  run->add_flag("--export-graph", f.run.export_graph, "also write the kNN edge list");
  run->add_flag("--force", f.run.force, "overwrite existing results");

  auto* cmp = app.add_subcommand("compare", "tabulate metrics of several runs");
  cmp->add_option("dirs", f.compare_dirs, "result directories")->required();
  cmp->add_flag("--json", f.compare_as_json, "print JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : chnc::exit_code(chnc::ErrorKind::config);
  }

  try {
    if (*gen) return run_gen(f);
    if (*run) return run_run(f, run);
    if (*cmp) return run_compare(f);
  } catch (const chnc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return chnc::exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return chnc::exit_code(chnc::ErrorKind::data);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return chnc::exit_code(chnc::ErrorKind::invariant);
  }
  return 0;
}
