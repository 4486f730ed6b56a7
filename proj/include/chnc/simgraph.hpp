#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chnc/dataset.hpp"
#include "chnc/error.hpp"
#include "chnc/forest.hpp"

namespace chnc {

struct SimilarityEdge {
  int i = 0;  // i < j
  int j = 0;
  double w = 0.0;

  bool operator==(const SimilarityEdge&) const = default;
};

/// Undirected weighted graph over samples. Edges are unique with i < j.
struct SimilarityGraph {
  std::size_t n = 0;
  std::vector<SimilarityEdge> edges;
  std::vector<double> degree;

  SimilarityGraph() = default;

  SimilarityGraph(std::size_t n_nodes, std::vector<SimilarityEdge> e)
      : n(n_nodes), edges(std::move(e)), degree(n_nodes, 0.0) {
    for (auto& edge : edges) {
      if (edge.i > edge.j) std::swap(edge.i, edge.j);
      require(edge.i != edge.j, "self loops are not allowed");
      require(edge.j < static_cast<int>(n), "edge endpoint out of range");
      require(edge.w > 0.0 && std::isfinite(edge.w), "edge weights must be finite and > 0");
    }
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
      return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    });
    for (std::size_t k = 1; k < edges.size(); ++k)
      require(edges[k].i != edges[k - 1].i || edges[k].j != edges[k - 1].j,
              "duplicate edge in similarity graph");
    for (const auto& edge : edges) {
      degree[static_cast<std::size_t>(edge.i)] += edge.w;
      degree[static_cast<std::size_t>(edge.j)] += edge.w;
    }
  }

  double mean_weight() const {
    if (edges.empty()) config_error("similarity graph has no edges");
    double sum = 0.0;
    for (const auto& e : edges) sum += e.w;
    return sum / static_cast<double>(edges.size());
  }
};

/// sqrt(sum_h rho_h (a_h - b_h)^2)
inline double weighted_distance(std::span<const double> a, std::span<const double> b,
                                const ImportanceVector& rho) {
  require(a.size() == b.size() && a.size() == rho.rho.size(),
          "weighted_distance: dimension mismatch");
  double sum = 0.0;
  for (std::size_t h = 0; h < a.size(); ++h) {
    const double d = a[h] - b[h];
    sum += rho.rho[h] * d * d;
  }
  return std::sqrt(sum);
}

/// exp(-dist / (2 sigma^2)). The exponent takes the distance itself, not its
/// square.
inline double gaussian_weight(double dist, double sigma) {
  require(dist >= 0.0, "gaussian_weight: negative distance");
  require(sigma > 0.0, "gaussian_weight: sigma must be > 0");
  return std::exp(-dist / (2.0 * sigma * sigma));
}

inline std::size_t default_k(std::size_t n) { return n < 10000 ? 15 : 10; }
inline double default_sigma(std::size_t n) { return n < 10000 ? 0.75 : 0.5; }

/// Symmetric kNN-union graph over all samples: [i,j] is an edge when either
/// endpoint is among the other's k nearest neighbours. Ties at the k-th
/// distance go to the smaller sample id.
inline SimilarityGraph build_knn_graph(const Dataset& ds, const ImportanceVector& rho,
                                       std::size_t k, double sigma) {
  if (k < 1) config_error("k must be >= 1");
  if (k >= ds.n)
    config_error("k (" + std::to_string(k) + ") must be smaller than the sample count (" +
                 std::to_string(ds.n) + ")");
  if (!(sigma > 0.0)) config_error("sigma must be > 0");
  require(rho.rho.size() == ds.n_features, "importance vector length mismatch");

  const std::size_t n = ds.n;
  const std::size_t H = ds.n_features;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n * k);
  using Candidate = std::pair<double, int>;  // (squared distance, id); max-heap top is worst
  std::vector<Candidate> heap;
  heap.reserve(k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    heap.clear();
    const double* xi = ds.features.data() + i * H;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double* xj = ds.features.data() + j * H;
      double d2 = 0.0;
      for (std::size_t h = 0; h < H; ++h) {
        const double d = xi[h] - xj[h];
        d2 += rho.rho[h] * d * d;
      }
      const Candidate c{d2, static_cast<int>(j)};
      if (heap.size() < k) {
        heap.push_back(c);
        std::push_heap(heap.begin(), heap.end());
      } else if (c < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = c;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    for (const auto& [d2, j] : heap)
      pairs.emplace_back(std::min<int>(static_cast<int>(i), j), std::max<int>(static_cast<int>(i), j));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  std::vector<SimilarityEdge> edges;
  edges.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    const double dist = weighted_distance(ds.row(static_cast<std::size_t>(i)),
                                          ds.row(static_cast<std::size_t>(j)), rho);
    double w = gaussian_weight(dist, sigma);
    // exp underflows to 0 only for absurd distances; keep the edge present.
    if (w <= 0.0) w = std::numeric_limits<double>::denorm_min();
    edges.push_back({i, j, w});
  }
  return SimilarityGraph(n, std::move(edges));
}

/// Edge list text: one "i j w" line per edge, 17 significant digits.
inline void write_edge_list(const SimilarityGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) data_error("cannot write " + path);
  char buf[64];
  for (const auto& e : g.edges) {
    std::snprintf(buf, sizeof buf, "%d %d %.17g\n", e.i, e.j, e.w);
    out << buf;
  }
  if (!out) data_error("write failed: " + path);
}

}  // namespace chnc
