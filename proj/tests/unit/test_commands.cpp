#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "chnc/commands.hpp"
#include "support/temp_dir.hpp"

using namespace chnc;
using namespace chnc::testing;
namespace fs = std::filesystem;

namespace {

// Small, fast run configuration on separable synthetic data.
RunConfig quick_config(const std::string& out) {
  RunConfig cfg;
  cfg.synthetic.n_samples = 200;
  cfg.synthetic.n_features = 3;
  cfg.synthetic.class_sep = 3.0;
  cfg.pipeline.n_trees = 10;
  cfg.pipeline.leaf_fractions = {0.01};
  cfg.pipeline.grid = parse_lambda_grid("-1:1:0.05");
  cfg.pipeline.seed = 11;
  cfg.out = out;
  return cfg;
}

}  // namespace

TEST(Json, FloatsUseSeventeenDigits) {
  json j;
  j["a"] = 0.1;
  j["b"] = 2.0;
  j["c"] = std::vector<int>{1, 2};
  j["d"] = json::array({json{{"x", 1}}});
  j["e"] = nullptr;
  j["f"] = json::object();
  EXPECT_EQ(dump_json(j),
            "{\n"
            "  \"a\": 0.10000000000000001,\n"
            "  \"b\": 2.0,\n"
            "  \"c\": [1, 2],\n"
            "  \"d\": [\n"
            "    {\n"
            "      \"x\": 1\n"
            "    }\n"
            "  ],\n"
            "  \"e\": null,\n"
            "  \"f\": {}\n"
            "}\n");
  EXPECT_THROW(dump_json(json(std::numeric_limits<double>::infinity())), Error);
}

TEST(Json, ReadRejectsInvalidFiles) {
  TempDir dir;
  try {
    read_json(dir.write("x.json", "{oops"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
  EXPECT_THROW(read_json(dir.file("missing.json")), Error);
}

TEST(Manifest, RoundTrip) {
  RunConfig cfg = quick_config("/tmp/x");
  cfg.input = "/data/in.csv";
  cfg.pipeline.k = 7;
  cfg.pipeline.sigma = 0.4;
  cfg.synthetic.layout = CentroidLayout::polytope;
  cfg.export_graph = true;
  const auto back = run_config_from_manifest(manifest_json(cfg));
  EXPECT_EQ(back.input, cfg.input);
  EXPECT_FALSE(back.truth);
  EXPECT_EQ(back.pipeline.k, cfg.pipeline.k);
  EXPECT_EQ(back.pipeline.sigma, cfg.pipeline.sigma);
  EXPECT_EQ(back.pipeline.grid.step, cfg.pipeline.grid.step);
  EXPECT_EQ(back.pipeline.leaf_fractions, cfg.pipeline.leaf_fractions);
  EXPECT_EQ(back.pipeline.seed, cfg.pipeline.seed);
  EXPECT_EQ(back.synthetic.layout, CentroidLayout::polytope);
  EXPECT_EQ(back.synthetic.class_sep, cfg.synthetic.class_sep);
  EXPECT_TRUE(back.export_graph);
  EXPECT_EQ(dump_json(manifest_json(back)), dump_json(manifest_json(cfg)));
}

TEST(Manifest, RejectsForeignDocuments) {
  json m = manifest_json(quick_config("o"));
  m["format"] = "something-else";
  EXPECT_THROW(run_config_from_manifest(m), Error);
  m = manifest_json(quick_config("o"));
  m.erase("seed");
  try {
    run_config_from_manifest(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
}

TEST(RunConfig, Validation) {
  auto cfg = quick_config("");
  EXPECT_THROW(cfg.validate(), Error);
  cfg = quick_config("o");
  cfg.labeled_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = quick_config("o");
  cfg.noise_rate = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = quick_config("o");
  cfg.truth = "t.csv";
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_THROW(parse_layout("sphere"), Error);
}

TEST(Gen, WritesCsvAndTruthAndRefusesOverwrite) {
  TempDir dir;
  GenConfig g;
  g.synthetic.n_samples = 50;
  g.out = dir.file("sub/d.csv");
  std::ostringstream log;
  cmd_gen(g, log);
  EXPECT_TRUE(fs::exists(g.out));
  EXPECT_TRUE(fs::exists(truth_path_for(g.out)));
  const auto ds = load_csv(g.out);
  EXPECT_EQ(ds.n, 50u);
  EXPECT_EQ(ds.count(Role::unlabeled), 0u);
  try {
    cmd_gen(g, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
  g.force = true;
  EXPECT_NO_THROW(cmd_gen(g, log));
}

TEST(Run, WritesOutputsAndIsDeterministic) {
  TempDir dir;
  std::ostringstream log;
  const auto a = cmd_run(quick_config(dir.file("a")), log);
  const auto b = cmd_run(quick_config(dir.file("b")), log);
  for (const char* f : {"predictions.json", "confidence.csv", "metrics.json", "importances.json",
                        "manifest.json"}) {
    ASSERT_TRUE(fs::exists(dir.path() / "a" / f)) << f;
    if (std::string(f) != "manifest.json") {
      EXPECT_EQ(read_file(dir.file(std::string("a/") + f)), read_file(dir.file(std::string("b/") + f)))
          << f;
    }
  }
  EXPECT_FALSE(fs::exists(dir.path() / "a" / "graph.txt"));
  EXPECT_EQ(a.metrics.n_test, 40u);
  EXPECT_EQ(a.metrics.n_noisy, 32u);  // floor(0.2 * 80) per class
  EXPECT_GE(a.metrics.accuracy, 0.9);

  const json m = read_json(dir.file("a/metrics.json"));
  EXPECT_EQ(m["n_test"].get<int>(), 40);
  EXPECT_TRUE(m["accuracy"].is_number());
  const json p = read_json(dir.file("a/predictions.json"));
  EXPECT_EQ(p["predictions"].size(), 40u);
  EXPECT_EQ(p["cv_table"].size(), 41u);
  EXPECT_EQ(b.pipeline.result.lambda_star, a.pipeline.result.lambda_star);

  try {
    cmd_run(quick_config(dir.file("a")), log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
}

TEST(Run, ManifestReplayReproducesOutputs) {
  TempDir dir;
  std::ostringstream log;
  auto cfg = quick_config(dir.file("a"));
  cfg.export_graph = true;
  cmd_run(cfg, log);
  EXPECT_TRUE(fs::exists(dir.path() / "a" / "graph.txt"));
  auto replay = run_config_from_manifest(read_json(dir.file("a/manifest.json")));
  replay.out = dir.file("r");
  cmd_run(replay, log);
  for (const char* f : {"predictions.json", "confidence.csv", "graph.txt"})
    EXPECT_EQ(read_file(dir.file(std::string("a/") + f)), read_file(dir.file(std::string("r/") + f)))
        << f;
}

TEST(Run, SeparableBlobsWithoutNoiseAreClassifiedPerfectly) {
  TempDir dir;
  std::ostringstream log;
  auto cfg = quick_config(dir.file("a"));
  cfg.synthetic.class_sep = 20.0;
  cfg.synthetic.clusters_per_class = 1;
  cfg.noise_rate = 0.0;
  const auto o = cmd_run(cfg, log);
  EXPECT_EQ(o.metrics.accuracy, 1.0);
  EXPECT_TRUE(o.pipeline.result.detected_noisy.empty());
}

TEST(Run, PartiallyLabeledCsvIsUsedAsIs) {
  TempDir dir;
  SyntheticConfig sc;
  sc.n_samples = 120;
  sc.n_features = 2;
  sc.class_sep = 4.0;
  sc.seed = 2;
  Dataset ds = generate_synthetic(sc);
  for (std::size_t i = 0; i < ds.n; i += 4) {
    ds.given_label[i] = 0;
    ds.role[i] = Role::unlabeled;
  }
  write_csv(ds, dir.file("in.csv"));
  auto cfg = quick_config(dir.file("out"));
  cfg.input = dir.file("in.csv");
  std::ostringstream log;
  const auto o = cmd_run(cfg, log);
  EXPECT_EQ(o.metrics.n_test, 30u);
  EXPECT_FALSE(o.dataset.has_truth());
  const json m = read_json(dir.file("out/metrics.json"));
  EXPECT_TRUE(m["accuracy"].is_null());
  EXPECT_FALSE(read_json(dir.file("out/manifest.json"))["split_applied"].get<bool>());
}

TEST(Run, MissingInputIsDataError) {
  TempDir dir;
  auto cfg = quick_config(dir.file("out"));
  cfg.input = dir.file("nope.csv");
  std::ostringstream log;
  try {
    cmd_run(cfg, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
}

TEST(Run, StageTagsInErrors) {
  TempDir dir;
  auto cfg = quick_config(dir.file("out"));
  cfg.pipeline.k = 500;
  std::ostringstream log;
  try {
    cmd_run(cfg, log);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("[graph]"), std::string::npos) << e.what();
  }
}

TEST(Compare, TablesAndErrors) {
  TempDir dir;
  fs::create_directories(dir.path() / "x");
  fs::create_directories(dir.path() / "y");
  json m;
  m["accuracy"] = 0.9;
  m["balanced_accuracy"] = 0.88;
  m["noise_f1"] = nullptr;
  write_json(m, dir.file("x/metrics.json"));
  write_json(m, dir.file("y/metrics.json"));

  const auto one = compare_runs({dir.file("x")});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].accuracy, 0.9);
  EXPECT_EQ(one[0].gap_from_max_pct, 0.0);

  const auto two = compare_runs({dir.file("x"), dir.file("y")});
  for (const auto& r : two) {
    EXPECT_EQ(r.gap_from_max_pct, 0.0);
    EXPECT_EQ(r.improvement_pct, 0.0);
  }
  const auto table = compare_table(two);
  EXPECT_NE(table.find("0.9000"), std::string::npos);
  EXPECT_NE(table.find("0.8800"), std::string::npos);
  EXPECT_EQ(compare_json(two).size(), 2u);
  EXPECT_TRUE(compare_json(two)[0]["noise_f1"].is_null());

  try {
    compare_runs({dir.file("x"), dir.file("missing")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
    EXPECT_NE(std::string(e.what()).find("metrics.json"), std::string::npos);
  }
  EXPECT_THROW(compare_runs({}), Error);
}
