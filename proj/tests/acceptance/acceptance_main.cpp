// Acceptance suite: one PASS/FAIL line per criterion. Run with criterion ids
// (C1 ... C9) as arguments, or with none to run all of them.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "chnc.hpp"
#include "support/random_instances.hpp"
#include "support/temp_dir.hpp"

using namespace chnc;
using namespace chnc::testing;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// C1: solver min-cut value equals brute-force enumeration on 200 graphs.
Verdict c1() {
  const auto t0 = Clock::now();
  Rng rng(2024);
  int mismatches = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(10);
    const auto g = random_constant_graph(rng, n, 20);
    const auto fast = min_cut(g, 0.0);
    const auto slow = brute_force_min_cut(g, 0.0);
    if (fast.infinite != slow.infinite || (!fast.infinite && fast.value != slow.value)) ++mismatches;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          std::to_string(mismatches) + " mismatches on 200 graphs, " + fmt("%.3f", secs) + " s"};
}

// C2: nested source sets over 41-point grids, each equal to a fixed-lambda solve.
Verdict c2() {
  Rng rng(7);
  const auto grid = uniform_grid(-1.0, 1.0, 41);
  int nest_violations = 0, solve_mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.below(30);
    const auto g = random_parametric_graph(rng, n);
    const auto cuts = parametric_min_cut(g, grid);
    std::vector<char> prev(n, 0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto independent = min_cut(g, grid[k]);
      if (cuts.source_set(k) != independent.source_set) ++solve_mismatches;
      const auto in = independent.membership(n);
      for (std::size_t v = 0; v < n; ++v)
        if (prev[v] && !in[v]) ++nest_violations;
      prev = in;
    }
  }
  return {nest_violations == 0 && solve_mismatches == 0,
          std::to_string(nest_violations) + " nestedness violations, " +
              std::to_string(solve_mismatches) + " mismatches vs independent solves (50 x 41)"};
}

double exhaustive_min(std::size_t n, const std::function<double(std::span<const char>)>& f) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) best = std::min(best, f(mask_members(mask, n)));
  return best;
}

// C3: the min-cut partition attains the exhaustive objective minimum.
Verdict c3() {
  Rng rng(99);
  int chnc_fail = 0, hnc_fail = 0, checks = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + rng.below(8);
    const auto G = random_similarity_graph(rng, n);
    const auto seeds = random_seeds(rng, n);
    const auto gamma = random_gamma(rng, n, 2.0 * rng.uniform());
    const auto unsat = ConfidenceVector::all_unsaturable(n);
    for (double l : {-0.5, 0.0, 0.3}) {
      ++checks;
      const auto in = min_cut(build_chnc_graph(G, seeds, gamma), l).membership(n);
      const double best = exhaustive_min(
          n, [&](std::span<const char> s) { return evaluate_chnc_objective(G, seeds, gamma, l, s); });
      if (std::abs(evaluate_chnc_objective(G, seeds, gamma, l, in) - best) > 1e-9) ++chnc_fail;

      const auto hin = min_cut(build_chnc_graph(G, seeds, unsat), l).membership(n);
      const double hbest = exhaustive_min(
          n, [&](std::span<const char> s) { return evaluate_hnc_objective(G, seeds, l, s); });
      if (std::abs(evaluate_hnc_objective(G, seeds, l, hin) - hbest) > 1e-9) ++hnc_fail;
    }
  }
  return {chnc_fail == 0 && hnc_fail == 0,
          std::to_string(checks) + " (instance, lambda) pairs: " + std::to_string(chnc_fail) +
              " CHNC-objective failures, " + std::to_string(hnc_fail) + " HNC-objective failures"};
}

// C4: CHNC with unsaturable penalties partitions exactly like HNC.
Verdict c4() {
  Rng rng(4);
  const auto grid = LambdaGridSpec{}.values();
  int mismatches = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 3 + rng.below(40);
    const auto G = random_similarity_graph(rng, n, 0.25);
    const auto seeds = random_seeds(rng, n);
    const auto chnc_cuts =
        parametric_min_cut(build_chnc_graph(G, seeds, ConfidenceVector::all_unsaturable(n)), grid);
    const auto hnc_cuts = parametric_min_cut(build_hnc_graph(G, seeds), grid);
    if (chnc_cuts.q_index != hnc_cuts.q_index) ++mismatches;
    for (double l : {-1.0, -0.5, 0.0, 0.3, 1.0}) {
      const auto r = fit_predict(G, seeds, ConfidenceVector::all_unsaturable(n), l);
      if (r.source_set != min_cut(build_hnc_graph(G, seeds), l).source_set || !r.detected_noisy.empty())
        ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " partition mismatches on 50 instances"};
}

// C5: confidence range, per-class monotonicity and the planted-graph check.
Verdict c5() {
  Rng rng(55);
  const auto grid = LambdaGridSpec{}.values();
  int range_fail = 0, mono_fail = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 4 + rng.below(60);
    const auto G = random_similarity_graph(rng, n, 0.15 + 0.3 * rng.uniform());
    const auto seeds = random_seeds(rng, n);
    const auto r = compute_confidences(G, seeds, grid);
    for (std::size_t i = 0; i < n; ++i) {
      if (seeds[i] == Role::unlabeled) continue;
      if (!(r.unscaled[i] >= 0.0 && r.unscaled[i] <= 1.0)) ++range_fail;
      for (std::size_t j = 0; j < n; ++j) {
        if (seeds[j] != seeds[i] || r.q_index[i] >= r.q_index[j]) continue;
        // Positive weights fall as the crossing index grows; negative weights
        // rise with it.
        const bool ok = seeds[i] == Role::positive ? r.unscaled[i] >= r.unscaled[j]
                                                   : r.unscaled[i] <= r.unscaled[j];
        if (!ok) ++mono_fail;
      }
    }
  }

  int planted_fail = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    Rng prng(s);
    std::vector<SimilarityEdge> edges;
    for (int i = 0; i < 40; ++i)
      for (int j = i + 1; j < 40; ++j) {
        const bool same = (i < 20) == (j < 20);
        edges.push_back({i, j, same ? 0.9 + 0.1 * prng.uniform() : 0.01 + 0.04 * prng.uniform()});
      }
    const SimilarityGraph G(40, std::move(edges));
    std::vector<Role> role(40, Role::unlabeled);
    for (int i = 0; i < 16; ++i) role[static_cast<std::size_t>(i)] = Role::positive;
    for (int i = 20; i < 36; ++i) role[static_cast<std::size_t>(i)] = Role::negative;
    const std::size_t flipped_neg = 3 + prng.below(13);   // in cluster A, labeled negative
    const std::size_t flipped_pos = 23 + prng.below(13);  // in cluster B, labeled positive
    role[flipped_neg] = Role::negative;
    role[flipped_pos] = Role::positive;
    const SeedSpec seeds(role);
    const auto r = compute_confidences(G, seeds, grid);
    for (std::size_t v = 0; v < 40; ++v) {
      if (seeds[v] == Role::positive && v != flipped_pos && !(r.unscaled[v] > r.unscaled[flipped_pos]))
        ++planted_fail;
      if (seeds[v] == Role::negative && v != flipped_neg && !(r.unscaled[v] > r.unscaled[flipped_neg]))
        ++planted_fail;
    }
  }
  return {range_fail == 0 && mono_fail == 0 && planted_fail == 0,
          std::to_string(range_fail) + " range violations, " + std::to_string(mono_fail) +
              " monotonicity violations, " + std::to_string(planted_fail) +
              " planted-graph ordering failures"};
}

struct RunScores {
  double accuracy = 0.0;
  double f1 = 0.0;
  double seconds = 0.0;
};

RunScores run_in_memory(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  bool split = false;
  const Dataset ds = prepare_dataset(cfg, split);
  const auto p = run_pipeline(ds, cfg.pipeline);
  const auto m = evaluate_run(ds, p.result);
  return {m.accuracy, m.noise.f1, seconds_since(t0)};
}

// C6: desk-scale synthetic classification.
Verdict c6() {
  double acc = 0.0, f1 = 0.0;
  std::string per_seed;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    RunConfig cfg;
    cfg.synthetic.n_samples = 1000;
    cfg.synthetic.n_features = 5;
    cfg.synthetic.class_sep = 2.0;
    cfg.synthetic.pos_fraction = 0.5;
    cfg.labeled_fraction = 0.8;
    cfg.noise_rate = 0.2;
    cfg.pipeline.seed = s;
    cfg.out = "unused";
    const auto r = run_in_memory(cfg);
    acc += r.accuracy / 5.0;
    f1 += r.f1 / 5.0;
    per_seed += fmt(" %.4f", r.accuracy) + "/" + fmt("%.4f", r.f1);
  }
  return {acc >= 0.90 && f1 >= 0.70,
          "mean accuracy " + fmt("%.4f", acc) + " (>= 0.90), mean noise F1 " + fmt("%.4f", f1) +
              " (>= 0.70); per seed acc/F1:" + per_seed};
}

// C7: WDBC with 20% noise, mean accuracy within 3 points of 94.50.
Verdict c7() {
  double acc = 0.0;
  std::string per_seed;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    RunConfig cfg;
    cfg.input = std::string(CHNC_TEST_DATA_DIR) + "/wdbc.csv";
    cfg.labeled_fraction = 0.8;
    cfg.noise_rate = 0.2;
    cfg.pipeline.seed = s;
    cfg.out = "unused";
    const auto r = run_in_memory(cfg);
    acc += 100.0 * r.accuracy / 5.0;
    per_seed += fmt(" %.2f", 100.0 * r.accuracy);
  }
  return {std::abs(acc - 94.50) <= 3.0,
          "mean accuracy " + fmt("%.2f", acc) + "% (target 94.50 +/- 3.0); per seed:" + per_seed};
}

// C8: full pipeline on 20000 x 16 synthetic data with k = 10 within 300 s.
Verdict c8() {
  RunConfig cfg;
  cfg.synthetic.n_samples = 20000;
  cfg.synthetic.n_features = 16;
  cfg.pipeline.k = 10;
  cfg.pipeline.seed = 1;
  cfg.out = "unused";
  const auto r = run_in_memory(cfg);
  return {r.seconds <= 300.0, "pipeline took " + fmt("%.1f", r.seconds) +
                                  " s (limit 300 s), 1001 lambda values, accuracy " +
                                  fmt("%.4f", r.accuracy)};
}

int shell(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return rc;
}

// C9: manifest replay through the CLI gives byte-identical outputs.
Verdict c9() {
  TempDir dir;
  const std::string cli = CHNC_CLI_PATH;
  const std::string quiet = " 2>/dev/null";
  std::string detail;
  bool ok = true;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"synthetic", "--n-samples 400 --n-features 4 --class-sep 2 --seed 3"},
      {"csv", "--input " + std::string(CHNC_TEST_DATA_DIR) + "/wdbc.csv --seed 5 --noise-rate 0.3"}};
  for (const auto& [name, args] : runs) {
    const std::string base = dir.file(name + "_base");
    if (shell(cli + " run " + args + " --out " + base + quiet) != 0) {
      ok = false;
      detail += name + ": base run failed; ";
      continue;
    }
    for (const char* replay : {"_r1", "_r2"}) {
      const std::string out = dir.file(name + replay);
      if (shell(cli + " run --manifest " + base + "/manifest.json --out " + out + quiet) != 0) {
        ok = false;
        detail += name + ": replay failed; ";
        continue;
      }
      for (const char* f : {"predictions.json", "confidence.csv"}) {
        const auto a = read_file(base + "/" + f);
        const auto b = read_file(out + "/" + f);
        if (a.empty() || a != b) {
          ok = false;
          detail += name + replay + "/" + f + " differs; ";
        }
      }
    }
    if (ok) detail += name + ": 2 replays byte-identical; ";
  }
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<std::string, std::function<Verdict()>>> criteria{
      {"C1", {"min-cut oracle equivalence", c1}},
      {"C2", {"nested cut property", c2}},
      {"C3", {"objective consistency of the cut graphs", c3}},
      {"C4", {"HNC reduction", c4}},
      {"C5", {"confidence-weight contract", c5}},
      {"C6", {"desk-scale classification", c6}},
      {"C7", {"WDBC accuracy band", c7}},
      {"C8", {"20000-sample performance", c8}},
      {"C9", {"manifest replay determinism", c9}},
  };
  std::vector<std::string> ids;
  for (int a = 1; a < argc; ++a) ids.emplace_back(argv[a]);
  if (ids.empty())
    for (const auto& [id, _] : criteria) ids.push_back(id);

  int failed = 0;
  for (const auto& id : ids) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << id << "\n";
      return 2;
    }
    Verdict v;
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << id << " " << (v.pass ? "PASS" : "FAIL") << "  " << it->second.first << ": "
              << v.detail << std::endl;
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
