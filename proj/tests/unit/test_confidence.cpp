#include <gtest/gtest.h>

#include <algorithm>

#include "chnc/confidence.hpp"
#include "support/random_instances.hpp"
#include "support/temp_dir.hpp"

using namespace chnc;
using namespace chnc::testing;

namespace {

struct OracleConfidence {
  std::vector<int> q;
  std::vector<double> gamma;
};

// Recomputes one class from independent fixed-lambda solves and the set
// formulas, without touching the nested-cut bookkeeping.
OracleConfidence oracle(const SimilarityGraph& G, const SeedSpec& seeds,
                        const std::vector<double>& grid, Role cls) {
  const auto g = cls == Role::positive ? build_pos_conf_graph(G, seeds) : build_neg_conf_graph(G, seeds);
  const Role other = cls == Role::positive ? Role::negative : Role::positive;
  std::vector<std::vector<char>> sets;
  for (double l : grid) sets.push_back(min_cut(g, l).membership(G.n));
  double pool = 0;
  for (std::size_t v = 0; v < G.n; ++v) pool += seeds[v] != other;

  OracleConfidence out{std::vector<int>(G.n, -1), std::vector<double>(G.n, 0.0)};
  for (std::size_t i = 0; i < G.n; ++i) {
    if (seeds[i] != cls) continue;
    int q = 0;
    for (const auto& s : sets) q += !s[i];
    out.q[i] = q;
    if (q == 0) {
      out.gamma[i] = cls == Role::positive ? 1.0 : 0.0;
      continue;
    }
    const auto& s = sets[static_cast<std::size_t>(q - 1)];
    double count = 0;
    for (std::size_t v = 0; v < G.n; ++v) {
      if (seeds[v] == other) continue;
      count += cls == Role::positive ? !s[v] : s[v];
    }
    out.gamma[i] = count / pool;
  }
  return out;
}

// Two clusters of 20; node 0 (cluster A) carries a negative label and node 20
// (cluster B) a positive one.
struct Planted {
  SimilarityGraph G;
  SeedSpec seeds;
};

Planted planted(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SimilarityEdge> edges;
  for (int i = 0; i < 40; ++i)
    for (int j = i + 1; j < 40; ++j) {
      const bool same = (i < 20) == (j < 20);
      edges.push_back({i, j, same ? 0.9 + 0.1 * rng.uniform() : 0.01 + 0.04 * rng.uniform()});
    }
  std::vector<Role> role(40, Role::unlabeled);
  for (int i = 0; i < 16; ++i) role[static_cast<std::size_t>(i)] = Role::positive;
  for (int i = 20; i < 36; ++i) role[static_cast<std::size_t>(i)] = Role::negative;
  role[0] = Role::negative;
  role[20] = Role::positive;
  return {SimilarityGraph(40, std::move(edges)), SeedSpec(std::move(role))};
}

std::vector<double> default_grid() { return uniform_grid(-1.0, 1.0, 1001); }

}  // namespace

TEST(Confidence, MatchesIndependentSolveOracle) {
  Rng rng(3);
  const auto grid = uniform_grid(-1.0, 1.0, 41);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 3 + rng.below(12);
    const auto G = random_similarity_graph(rng, n, 0.3 + 0.5 * rng.uniform());
    const auto seeds = random_seeds(rng, n);
    const auto pos = positive_confidences(G, seeds, grid);
    const auto neg = negative_confidences(G, seeds, grid);
    const auto op = oracle(G, seeds, grid, Role::positive);
    const auto on = oracle(G, seeds, grid, Role::negative);
    for (std::size_t v = 0; v < n; ++v) {
      if (seeds[v] == Role::positive) {
        EXPECT_EQ(pos.q_index[v], op.q[v]);
        EXPECT_DOUBLE_EQ(pos.unscaled[v], op.gamma[v]);
      } else if (seeds[v] == Role::negative) {
        EXPECT_EQ(neg.q_index[v], on.q[v]);
        EXPECT_DOUBLE_EQ(neg.unscaled[v], on.gamma[v]);
      }
    }
  }
}

TEST(Confidence, RangeAndPerClassMonotonicity) {
  Rng rng(17);
  const auto grid = default_grid();
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 5 + rng.below(40);
    const auto G = random_similarity_graph(rng, n, 0.2);
    const auto seeds = random_seeds(rng, n);
    const auto r = compute_confidences(G, seeds, grid);
    for (std::size_t i = 0; i < n; ++i) {
      if (seeds[i] == Role::unlabeled) {
        EXPECT_EQ(r.q_index[i], -1);
        EXPECT_EQ(r.scaled[i], 0.0);
        continue;
      }
      EXPECT_GE(r.unscaled[i], 0.0);
      EXPECT_LE(r.unscaled[i], 1.0);
      EXPECT_EQ(r.scaled[i], r.theta * r.unscaled[i]);
      for (std::size_t j = 0; j < n; ++j) {
        if (seeds[j] != seeds[i] || r.q_index[i] >= r.q_index[j]) continue;
        if (seeds[i] == Role::positive)
          EXPECT_GE(r.unscaled[i], r.unscaled[j]);
        else
          EXPECT_LE(r.unscaled[i], r.unscaled[j]);
      }
    }
  }
}

TEST(Confidence, RefinedGridKeepsCoarseOrdering) {
  Rng rng(29);
  const auto fine = uniform_grid(-1.0, 1.0, 81);
  std::vector<double> coarse;
  for (std::size_t k = 0; k < fine.size(); k += 8) coarse.push_back(fine[k]);
  for (int t = 0; t < 25; ++t) {
    const std::size_t n = 5 + rng.below(20);
    const auto G = random_similarity_graph(rng, n, 0.3);
    const auto seeds = random_seeds(rng, n);
    const auto a = compute_confidences(G, seeds, coarse);
    const auto b = compute_confidences(G, seeds, fine);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (seeds[i] == Role::unlabeled || seeds[j] != seeds[i]) continue;
        if (a.q_index[i] < a.q_index[j]) {
          EXPECT_LT(b.q_index[i], b.q_index[j]);
          if (seeds[i] == Role::positive)
            EXPECT_GE(b.unscaled[i], b.unscaled[j]);
          else
            EXPECT_LE(b.unscaled[i], b.unscaled[j]);
        }
      }
  }
}

TEST(Confidence, PlantedMislabeledSeedsGetSmallestWeight) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p = planted(seed);
    const auto r = compute_confidences(p.G, p.seeds, default_grid());
    for (std::size_t v = 0; v < 40; ++v) {
      if (v == 0 || v == 20) continue;
      if (p.seeds[v] == Role::positive) {
        EXPECT_GT(r.unscaled[v], r.unscaled[20]) << v;
      } else if (p.seeds[v] == Role::negative) {
        EXPECT_GT(r.unscaled[v], r.unscaled[0]) << v;
      }
    }
    // The oracle agrees on the planted instance too.
    const auto op = oracle(p.G, p.seeds, default_grid(), Role::positive);
    EXPECT_DOUBLE_EQ(op.gamma[20], r.unscaled[20]);
  }
}

TEST(Confidence, ExtremeCrossingConventions) {
  // Path 0 - 1 - 2 with node 0 positive, node 2 negative.
  SimilarityGraph G(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const SeedSpec seeds({Role::positive, Role::unlabeled, Role::negative});
  // Node 0 already in S at the first grid value.
  const std::vector<double> late{0.75, 1.0};
  const auto pos = positive_confidences(G, seeds, late);
  EXPECT_EQ(pos.q_index[0], 0);
  EXPECT_DOUBLE_EQ(pos.unscaled[0], 1.0);

  const std::vector<double> full{-1.0, 1.0};
  const auto neg = negative_confidences(G, seeds, full);
  EXPECT_EQ(neg.q_index[2], 1);
  EXPECT_DOUBLE_EQ(neg.unscaled[2], 0.0);  // S_1 = L+ when it crosses
  EXPECT_TRUE(neg.warnings.empty());
}

TEST(Confidence, WarnsWhenGridMissesExtremes) {
  SimilarityGraph G(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const SeedSpec seeds({Role::positive, Role::unlabeled, Role::negative});
  const std::vector<double> grid{0.0};
  const auto r = compute_confidences(G, seeds, grid);
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_THROW(compute_confidences(G, seeds, std::vector<double>{}), Error);
  EXPECT_THROW(compute_confidences(G, seeds, std::vector<double>{0.5, 0.1}), Error);
}

TEST(Scale, ThetaIsMeanEdgeWeight) {
  SimilarityGraph G(3, {{0, 1, 0.5}, {1, 2, 0.5}});
  const SeedSpec seeds({Role::positive, Role::unlabeled, Role::negative});
  const auto r = compute_confidences(G, seeds, default_grid());
  EXPECT_DOUBLE_EQ(r.theta, 0.5);
  for (std::size_t v : {0u, 2u}) EXPECT_EQ(r.scaled[v], 0.5 * r.unscaled[v]);

  SimilarityGraph H(3, {{0, 1, 0.2}, {1, 2, 0.8}});
  EXPECT_DOUBLE_EQ(compute_confidences(H, seeds, default_grid()).theta, 0.5);
}

TEST(Scale, ZeroStaysZero) {
  ClassConfidence pos{Role::positive, {0.0, 0.0, 0.0}, {3, -1, -1}, {}};
  ClassConfidence neg{Role::negative, {0.0, 0.0, 0.0}, {-1, -1, 0}, {"w"}};
  SimilarityGraph G(3, {{0, 1, 0.3}, {1, 2, 0.9}});
  const auto r = scale_confidences(pos, neg, G, SeedSpec({Role::positive, Role::unlabeled,
                                                           Role::negative}));
  EXPECT_EQ(r.scaled, (std::vector<double>{0.0, 0.0, 0.0}));
  EXPECT_EQ(r.q_index, (std::vector<int>{3, -1, 0}));
  EXPECT_EQ(r.warnings, (std::vector<std::string>{"w"}));
  EXPECT_THROW(scale_confidences(pos, neg, SimilarityGraph(3, {}), SeedSpec({Role::positive,
               Role::unlabeled, Role::negative})), Error);
}

TEST(ConfidenceCsv, LabeledRowsOnly) {
  ConfidenceReport r;
  r.role = {Role::positive, Role::unlabeled, Role::negative};
  r.q_index = {4, -1, 2};
  r.unscaled = {0.5, 0.0, 0.25};
  r.scaled = {0.1, 0.0, 0.05};
  TempDir dir;
  write_confidence_csv(r, dir.file("c.csv"));
  EXPECT_EQ(read_file(dir.file("c.csv")),
            "sample_id,class,q_index,unscaled,scaled\n"
            "0,+1,4,0.5,0.10000000000000001\n"
            "2,-1,2,0.25,0.050000000000000003\n");
}
