#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "chnc/dataset.hpp"
#include "chnc/error.hpp"
#include "chnc/paramcut.hpp"
#include "chnc/simgraph.hpp"

namespace chnc {

/// Per-node seed roles: positive seeds L+, negative seeds L-, the rest U.
struct SeedSpec {
  std::vector<Role> role;

  SeedSpec() = default;
  explicit SeedSpec(std::vector<Role> r) : role(std::move(r)) {}

  static SeedSpec from_sets(std::size_t n, std::span<const int> pos, std::span<const int> neg) {
    SeedSpec s(std::vector<Role>(n, Role::unlabeled));
    for (int v : pos) {
      require(v >= 0 && static_cast<std::size_t>(v) < n, "seed id out of range");
      s.role[static_cast<std::size_t>(v)] = Role::positive;
    }
    for (int v : neg) {
      require(v >= 0 && static_cast<std::size_t>(v) < n, "seed id out of range");
      if (s.role[static_cast<std::size_t>(v)] == Role::positive)
        config_error("node " + std::to_string(v) + " is both a positive and a negative seed");
      s.role[static_cast<std::size_t>(v)] = Role::negative;
    }
    return s;
  }

  static SeedSpec from_dataset(const Dataset& ds) { return SeedSpec(ds.role); }

  std::size_t size() const { return role.size(); }
  Role operator[](std::size_t v) const { return role[v]; }

  std::size_t count(Role r) const {
    std::size_t c = 0;
    for (Role x : role) c += x == r;
    return c;
  }
};

/// Per-node penalty gamma_i for labeled nodes (entries of unlabeled nodes are
/// ignored). +infinity marks an unsaturable penalty.
struct ConfidenceVector {
  std::vector<double> gamma;

  static constexpr double unsaturable = std::numeric_limits<double>::infinity();

  static ConfidenceVector all_unsaturable(std::size_t n) {
    return {std::vector<double>(n, unsaturable)};
  }
};

/// Equivalent lambda of the weighted ratio form with emphasis alpha on the
/// source side and beta on the sink side.
inline double lambda_from_alpha_beta(double alpha, double beta) {
  require(alpha >= 0.0 && beta >= 0.0, "alpha and beta must be >= 0");
  return (alpha - beta) / (1.0 + alpha + beta);
}

namespace detail {

inline ParametricGraph similarity_arcs(const SimilarityGraph& G) {
  ParametricGraph g(G.n);
  for (const auto& e : G.edges) {
    g.add_arc(e.i, e.j, e.w);
    g.add_arc(e.j, e.i, e.w);
  }
  return g;
}

inline void set_lambda_arcs(ParametricGraph& g, const SimilarityGraph& G, int v) {
  const double d = G.degree[static_cast<std::size_t>(v)];
  g.set_source(v, Capacity::pos_part(d));
  g.set_sink(v, Capacity::neg_part(d));
}

inline void check_seeds(const SimilarityGraph& G, const SeedSpec& seeds) {
  require(seeds.size() == G.n, "seed spec size does not match graph");
}

inline Capacity penalty_capacity(double gamma, int v) {
  if (std::isinf(gamma) && gamma > 0.0) return Capacity::unsaturable();
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    contract_violation("confidence weight of node " + std::to_string(v) +
                       " must be finite and >= 0");
  return Capacity::constant(gamma);
}

}  // namespace detail

/// HNC graph: positive seeds tied to s, negative seeds tied to t, unlabeled
/// nodes carry max(lambda d, 0) / max(-lambda d, 0) arcs.
inline ParametricGraph build_hnc_graph(const SimilarityGraph& G, const SeedSpec& seeds) {
  detail::check_seeds(G, seeds);
  if (seeds.count(Role::positive) == 0 || seeds.count(Role::negative) == 0)
    config_error("HNC needs at least one positive and one negative seed");
  auto g = detail::similarity_arcs(G);
  for (std::size_t v = 0; v < G.n; ++v) {
    const int id = static_cast<int>(v);
    switch (seeds[v]) {
      case Role::positive: g.set_source(id, Capacity::unsaturable()); break;
      case Role::negative: g.set_sink(id, Capacity::unsaturable()); break;
      case Role::unlabeled: detail::set_lambda_arcs(g, G, id); break;
    }
  }
  return g;
}

/// CHNC graph: like the HNC graph with seed arcs of capacity gamma_i.
inline ParametricGraph build_chnc_graph(const SimilarityGraph& G, const SeedSpec& seeds,
                                        const ConfidenceVector& gamma) {
  detail::check_seeds(G, seeds);
  require(gamma.gamma.size() == G.n, "confidence vector size does not match graph");
  if (seeds.count(Role::positive) == 0 || seeds.count(Role::negative) == 0)
    config_error("CHNC needs at least one positive and one negative seed");
  auto g = detail::similarity_arcs(G);
  for (std::size_t v = 0; v < G.n; ++v) {
    const int id = static_cast<int>(v);
    switch (seeds[v]) {
      case Role::positive: g.set_source(id, detail::penalty_capacity(gamma.gamma[v], id)); break;
      case Role::negative: g.set_sink(id, detail::penalty_capacity(gamma.gamma[v], id)); break;
      case Role::unlabeled: detail::set_lambda_arcs(g, G, id); break;
    }
  }
  return g;
}

/// Graph for positive confidences: negative seeds tied to t, every other
/// node (positive seeds included) treated as unlabeled.
inline ParametricGraph build_pos_conf_graph(const SimilarityGraph& G, const SeedSpec& seeds) {
  detail::check_seeds(G, seeds);
  if (seeds.count(Role::negative) == 0) config_error("need at least one negative seed");
  auto g = detail::similarity_arcs(G);
  for (std::size_t v = 0; v < G.n; ++v) {
    const int id = static_cast<int>(v);
    if (seeds[v] == Role::negative)
      g.set_sink(id, Capacity::unsaturable());
    else
      detail::set_lambda_arcs(g, G, id);
  }
  return g;
}

/// Mirror of build_pos_conf_graph: positive seeds tied to s.
inline ParametricGraph build_neg_conf_graph(const SimilarityGraph& G, const SeedSpec& seeds) {
  detail::check_seeds(G, seeds);
  if (seeds.count(Role::positive) == 0) config_error("need at least one positive seed");
  auto g = detail::similarity_arcs(G);
  for (std::size_t v = 0; v < G.n; ++v) {
    const int id = static_cast<int>(v);
    if (seeds[v] == Role::positive)
      g.set_source(id, Capacity::unsaturable());
    else
      detail::set_lambda_arcs(g, G, id);
  }
  return g;
}

/// C(S, S^c): total weight of similarity edges crossing the cut.
inline double cut_weight(const SimilarityGraph& G, std::span<const char> in_s) {
  double c = 0.0;
  for (const auto& e : G.edges)
    if (in_s[static_cast<std::size_t>(e.i)] != in_s[static_cast<std::size_t>(e.j)]) c += e.w;
  return c;
}

/// C(S, S^c) - lambda * d(S cap U) + penalties of seeds placed on the wrong
/// side. Returns +infinity when an unsaturable penalty is violated.
inline double evaluate_chnc_objective(const SimilarityGraph& G, const SeedSpec& seeds,
                                      const ConfidenceVector& gamma, double lambda,
                                      std::span<const char> in_s) {
  detail::check_seeds(G, seeds);
  require(in_s.size() == G.n && gamma.gamma.size() == G.n, "size mismatch");
  double value = cut_weight(G, in_s);
  for (std::size_t v = 0; v < G.n; ++v) {
    const bool s_side = in_s[v] != 0;
    double penalty = 0.0;
    if (seeds[v] == Role::unlabeled) {
      if (s_side) value -= lambda * G.degree[v];
    } else if (seeds[v] == Role::positive && !s_side) {
      penalty = gamma.gamma[v];
    } else if (seeds[v] == Role::negative && s_side) {
      penalty = gamma.gamma[v];
    }
    if (std::isinf(penalty)) return std::numeric_limits<double>::infinity();
    value += penalty;
  }
  return value;
}

/// C(S, S^c) - lambda * d(S) subject to L+ in S and L- outside S; +infinity
/// when the seed constraint is violated. Differs from the CHNC objective
/// with unsaturable penalties by the constant -lambda * d(L+).
inline double evaluate_hnc_objective(const SimilarityGraph& G, const SeedSpec& seeds,
                                     double lambda, std::span<const char> in_s) {
  detail::check_seeds(G, seeds);
  require(in_s.size() == G.n, "size mismatch");
  double value = cut_weight(G, in_s);
  for (std::size_t v = 0; v < G.n; ++v) {
    const bool s_side = in_s[v] != 0;
    if ((seeds[v] == Role::positive && !s_side) || (seeds[v] == Role::negative && s_side))
      return std::numeric_limits<double>::infinity();
    if (s_side) value -= lambda * G.degree[v];
  }
  return value;
}

}  // namespace chnc
