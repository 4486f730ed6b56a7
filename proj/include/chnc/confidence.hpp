#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "chnc/dataset.hpp"
#include "chnc/error.hpp"
#include "chnc/hnc_graphs.hpp"
#include "chnc/paramcut.hpp"
#include "chnc/simgraph.hpp"

namespace chnc {

/// Confidence weights of one seed class. Vectors are indexed by node; entries
/// of nodes outside the class are 0 (unscaled) and -1 (q_index).
struct ClassConfidence {
  Role cls = Role::positive;
  std::vector<double> unscaled;
  std::vector<int> q_index;
  std::vector<std::string> warnings;
};

struct ConfidenceReport {
  std::vector<Role> role;
  std::vector<int> q_index;      // -1 for unlabeled nodes
  std::vector<double> unscaled;  // 0 for unlabeled nodes
  std::vector<double> scaled;
  double theta = 0.0;
  std::vector<std::string> warnings;

  ConfidenceVector gamma() const { return {scaled}; }
};

namespace detail {

inline std::vector<double> ascending_grid(std::span<const double> lambdas) {
  if (lambdas.empty()) config_error("lambda grid is empty");
  for (std::size_t k = 1; k < lambdas.size(); ++k)
    if (!(lambdas[k - 1] < lambdas[k])) config_error("lambda grid must be strictly ascending");
  return {lambdas.begin(), lambdas.end()};
}

}  // namespace detail

/// gamma_i = |complement(S_{q_i}) within L+ and U| / |L+ and U| for positive
/// seeds, where S_{q_i} is the last source set not containing i (1-based).
inline ClassConfidence positive_confidences(const SimilarityGraph& G, const SeedSpec& seeds,
                                            std::span<const double> lambdas) {
  const auto grid = detail::ascending_grid(lambdas);
  const ParametricGraph g = build_pos_conf_graph(G, seeds);
  const NestedCuts cuts = parametric_min_cut(g, grid);
  const double pool = static_cast<double>(G.n - seeds.count(Role::negative));

  ClassConfidence out;
  out.cls = Role::positive;
  out.unscaled.assign(G.n, 0.0);
  out.q_index.assign(G.n, -1);
  if (cuts.set_sizes.front() != 0)
    out.warnings.push_back("positive run: source set is not empty at the smallest lambda");
  if (static_cast<double>(cuts.set_sizes.back()) != pool)
    out.warnings.push_back("positive run: source set does not cover all non-negative nodes at "
                           "the largest lambda");
  for (std::size_t v = 0; v < G.n; ++v) {
    if (seeds[v] != Role::positive) continue;
    const int qi = cuts.q_index[v];
    out.q_index[v] = qi;
    if (qi == 0) {
      out.unscaled[v] = 1.0;
    } else {
      const auto last_out = cuts.set_sizes[static_cast<std::size_t>(qi) - 1];
      out.unscaled[v] = (pool - static_cast<double>(last_out)) / pool;
    }
  }
  return out;
}

/// gamma_i = |S_{q_i} within L- and U| / |L- and U| for negative seeds.
inline ClassConfidence negative_confidences(const SimilarityGraph& G, const SeedSpec& seeds,
                                            std::span<const double> lambdas) {
  const auto grid = detail::ascending_grid(lambdas);
  const ParametricGraph g = build_neg_conf_graph(G, seeds);
  const NestedCuts cuts = parametric_min_cut(g, grid);
  const std::size_t n_pos = seeds.count(Role::positive);
  const double pool = static_cast<double>(G.n - n_pos);

  ClassConfidence out;
  out.cls = Role::negative;
  out.unscaled.assign(G.n, 0.0);
  out.q_index.assign(G.n, -1);
  if (cuts.set_sizes.front() != n_pos)
    out.warnings.push_back("negative run: source set exceeds the positive seeds at the smallest "
                           "lambda");
  if (cuts.set_sizes.back() != G.n)
    out.warnings.push_back("negative run: source set does not cover all nodes at the largest "
                           "lambda");
  for (std::size_t v = 0; v < G.n; ++v) {
    if (seeds[v] != Role::negative) continue;
    const int qi = cuts.q_index[v];
    out.q_index[v] = qi;
    if (qi > 0) {
      const auto last_out = cuts.set_sizes[static_cast<std::size_t>(qi) - 1];
      out.unscaled[v] = (static_cast<double>(last_out) - static_cast<double>(n_pos)) / pool;
    }
  }
  return out;
}

/// Merges both classes and multiplies by theta, the mean similarity weight.
inline ConfidenceReport scale_confidences(const ClassConfidence& pos, const ClassConfidence& neg,
                                          const SimilarityGraph& G, const SeedSpec& seeds) {
  require(pos.cls == Role::positive && neg.cls == Role::negative, "confidence classes swapped");
  require(pos.unscaled.size() == G.n && neg.unscaled.size() == G.n, "confidence size mismatch");
  ConfidenceReport r;
  r.theta = G.mean_weight();
  r.role = seeds.role;
  r.q_index.assign(G.n, -1);
  r.unscaled.assign(G.n, 0.0);
  r.scaled.assign(G.n, 0.0);
  for (std::size_t v = 0; v < G.n; ++v) {
    const ClassConfidence* src = seeds[v] == Role::positive   ? &pos
                                 : seeds[v] == Role::negative ? &neg
                                                              : nullptr;
    if (!src) continue;
    r.q_index[v] = src->q_index[v];
    r.unscaled[v] = src->unscaled[v];
    r.scaled[v] = r.theta * r.unscaled[v];
  }
  r.warnings = pos.warnings;
  r.warnings.insert(r.warnings.end(), neg.warnings.begin(), neg.warnings.end());
  return r;
}

inline ConfidenceReport compute_confidences(const SimilarityGraph& G, const SeedSpec& seeds,
                                            std::span<const double> lambdas) {
  return scale_confidences(positive_confidences(G, seeds, lambdas),
                           negative_confidences(G, seeds, lambdas), G, seeds);
}

/// CSV with header sample_id,class,q_index,unscaled,scaled; labeled nodes only.
inline void write_confidence_csv(const ConfidenceReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) data_error("cannot write " + path);
  out << "sample_id,class,q_index,unscaled,scaled\n";
  for (std::size_t v = 0; v < r.role.size(); ++v) {
    if (r.role[v] == Role::unlabeled) continue;
    out << v << ',' << detail::label_token(label_of(r.role[v])) << ',' << r.q_index[v] << ','
        << detail::format_real(r.unscaled[v]) << ',' << detail::format_real(r.scaled[v]) << '\n';
  }
  if (!out) data_error("write failed: " + path);
}

}  // namespace chnc
