#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chnc/error.hpp"
#include "chnc/maxflow.hpp"

namespace chnc {

enum class CapacityKind : std::uint8_t {
  absent,       // no arc
  constant,     // c
  pos_part,     // max(lambda * d, 0)
  neg_part,     // max(-lambda * d, 0)
  unsaturable,  // never cut
};

/// Capacity of a source or sink arc as a function of lambda.
struct Capacity {
  CapacityKind kind = CapacityKind::absent;
  double coef = 0.0;

  static Capacity none() { return {}; }
  static Capacity constant(double c) { return {CapacityKind::constant, c}; }
  static Capacity pos_part(double d) { return {CapacityKind::pos_part, d}; }
  static Capacity neg_part(double d) { return {CapacityKind::neg_part, d}; }
  static Capacity unsaturable() { return {CapacityKind::unsaturable, 0.0}; }

  bool is_unsaturable() const { return kind == CapacityKind::unsaturable; }

  /// Finite capacity at `lambda`; not defined for unsaturable arcs.
  double at(double lambda) const {
    switch (kind) {
      case CapacityKind::absent: return 0.0;
      case CapacityKind::constant: return coef;
      case CapacityKind::pos_part: return std::max(lambda * coef, 0.0);
      case CapacityKind::neg_part: return std::max(-lambda * coef, 0.0);
      case CapacityKind::unsaturable: break;
    }
    contract_violation("finite capacity requested for an unsaturable arc");
  }

  bool operator==(const Capacity&) const = default;
};

struct FixedArc {
  int from = 0;
  int to = 0;
  double capacity = 0.0;

  bool operator==(const FixedArc&) const = default;
};

/// s-t graph over internal nodes 0..n-1 whose source arcs are nondecreasing
/// and sink arcs nonincreasing in lambda, with lambda-independent inner arcs.
class ParametricGraph {
 public:
  explicit ParametricGraph(std::size_t n) : source_(n), sink_(n) {}

  std::size_t size() const { return source_.size(); }

  void add_arc(int from, int to, double capacity) {
    check_node(from);
    check_node(to);
    require(from != to, "self loop arc");
    require(capacity >= 0.0 && std::isfinite(capacity), "arc capacity must be finite and >= 0");
    arcs_.push_back({from, to, capacity});
  }

  void set_source(int v, Capacity c) {
    check_node(v);
    require(c.kind == CapacityKind::absent || c.kind == CapacityKind::unsaturable ||
                ((c.kind == CapacityKind::constant || c.kind == CapacityKind::pos_part) &&
                 c.coef >= 0.0 && std::isfinite(c.coef)),
            "source arc of node " + std::to_string(v) + " is not nondecreasing in lambda");
    source_[static_cast<std::size_t>(v)] = c;
  }

  void set_sink(int v, Capacity c) {
    check_node(v);
    require(c.kind == CapacityKind::absent || c.kind == CapacityKind::unsaturable ||
                ((c.kind == CapacityKind::constant || c.kind == CapacityKind::neg_part) &&
                 c.coef >= 0.0 && std::isfinite(c.coef)),
            "sink arc of node " + std::to_string(v) + " is not nonincreasing in lambda");
    sink_[static_cast<std::size_t>(v)] = c;
  }

  const Capacity& source(int v) const { return source_[static_cast<std::size_t>(v)]; }
  const Capacity& sink(int v) const { return sink_[static_cast<std::size_t>(v)]; }
  const std::vector<FixedArc>& arcs() const { return arcs_; }

  bool operator==(const ParametricGraph&) const = default;

 private:
  void check_node(int v) const {
    require(v >= 0 && static_cast<std::size_t>(v) < size(), "node id out of range");
  }

  std::vector<Capacity> source_;
  std::vector<Capacity> sink_;
  std::vector<FixedArc> arcs_;
};

struct CutValue {
  double value = 0.0;
  bool infinite = false;
};

/// Capacity of the cut ({s} + S, {t} + rest) at `lambda`.
inline CutValue cut_capacity(const ParametricGraph& g, double lambda,
                             std::span<const char> in_source) {
  require(in_source.size() == g.size(), "membership vector size mismatch");
  CutValue out;
  for (const auto& a : g.arcs())
    if (in_source[static_cast<std::size_t>(a.from)] && !in_source[static_cast<std::size_t>(a.to)])
      out.value += a.capacity;
  for (std::size_t v = 0; v < g.size(); ++v) {
    const Capacity& c = in_source[v] ? g.sink(static_cast<int>(v)) : g.source(static_cast<int>(v));
    if (c.is_unsaturable())
      out.infinite = true;
    else
      out.value += c.at(lambda);
  }
  return out;
}

struct CutResult {
  double lambda = 0.0;
  std::vector<int> source_set;  // sorted node ids, excludes s and t
  double value = 0.0;
  bool infinite = false;

  std::vector<char> membership(std::size_t n) const {
    std::vector<char> in(n, 0);
    for (int v : source_set) in[static_cast<std::size_t>(v)] = 1;
    return in;
  }
};

/// Minimal source sets for an ascending lambda list, encoded by crossing
/// index: node i is in the sink set for the first q_index[i] lambdas and in
/// the source set afterwards (q_index[i] == lambdas.size(): never joins).
struct NestedCuts {
  std::vector<double> lambdas;
  std::vector<int> q_index;
  std::vector<std::size_t> set_sizes;

  std::size_t size() const { return lambdas.size(); }

  /// Membership in S_k for 0-based grid position k.
  bool in_source(std::size_t node, std::size_t k) const {
    return static_cast<std::size_t>(q_index[node]) <= k;
  }

  std::vector<int> source_set(std::size_t k) const {
    std::vector<int> out;
    for (std::size_t v = 0; v < q_index.size(); ++v)
      if (in_source(v, k)) out.push_back(static_cast<int>(v));
    return out;
  }
};

enum class ParametricStrategy {
  bisection,    // divide the lambda list, contracting decided nodes into s or t
  independent,  // one fresh max-flow per lambda
};

/// Minimum-cut engine for one ParametricGraph. Keeps scratch buffers, so an
/// instance must not be shared between threads.
class CutSolver {
 public:
  explicit CutSolver(const ParametricGraph& g) : g_(g), adj_(g.size()), local_(g.size(), -1) {
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (g.source(static_cast<int>(v)).is_unsaturable() &&
          g.sink(static_cast<int>(v)).is_unsaturable())
        contract_violation("node " + std::to_string(v) +
                           " has unsaturable source and sink arcs; no finite cut exists");
    }
    // Merge parallel and antiparallel arcs into one record per node pair.
    std::vector<FixedArc> arcs = g.arcs();
    for (auto& a : arcs)
      if (a.from > a.to) {
        std::swap(a.from, a.to);
        a.capacity = -a.capacity - 1.0;  // tag as reversed; decoded below
      }
    std::stable_sort(arcs.begin(), arcs.end(), [](const FixedArc& a, const FixedArc& b) {
      return std::pair(a.from, a.to) < std::pair(b.from, b.to);
    });
    for (std::size_t k = 0; k < arcs.size();) {
      const int u = arcs[k].from, v = arcs[k].to;
      double fwd = 0.0, bwd = 0.0;
      for (; k < arcs.size() && arcs[k].from == u && arcs[k].to == v; ++k) {
        if (arcs[k].capacity >= 0.0)
          fwd += arcs[k].capacity;
        else
          bwd += -arcs[k].capacity - 1.0;
      }
      adj_[static_cast<std::size_t>(u)].push_back({v, fwd, bwd});
      adj_[static_cast<std::size_t>(v)].push_back({u, bwd, fwd});
    }
  }

  CutResult min_cut(double lambda) const {
    std::vector<int> active;
    std::vector<char> side(g_.size(), 0);
    for (std::size_t v = 0; v < g_.size(); ++v) {
      if (g_.source(static_cast<int>(v)).is_unsaturable())
        side[v] = 1;
      else if (!g_.sink(static_cast<int>(v)).is_unsaturable())
        active.push_back(static_cast<int>(v));
    }
    for (int v : solve_active(lambda, active, [&](int u) { return side[static_cast<std::size_t>(u)] != 0; }))
      side[static_cast<std::size_t>(v)] = 1;
    return make_result(lambda, side);
  }

  NestedCuts parametric(std::span<const double> lambdas,
                        ParametricStrategy strategy = ParametricStrategy::bisection) const {
    for (std::size_t k = 1; k < lambdas.size(); ++k)
      require(lambdas[k - 1] < lambdas[k], "lambda list must be strictly ascending");
    const int q = static_cast<int>(lambdas.size());
    NestedCuts out;
    out.lambdas.assign(lambdas.begin(), lambdas.end());
    out.q_index.assign(g_.size(), q);

    if (strategy == ParametricStrategy::independent) {
      for (int k = 0; k < q; ++k) {
        const auto in = min_cut(lambdas[static_cast<std::size_t>(k)]).membership(g_.size());
        for (std::size_t v = 0; v < g_.size(); ++v) {
          if (in[v] && out.q_index[v] == q) out.q_index[v] = k;
          require((in[v] != 0) == (out.q_index[v] <= k), "minimum cuts are not nested");
        }
      }
    } else {
      std::vector<int> active;
      entry_upper_.assign(g_.size(), std::numeric_limits<int>::max());
      for (std::size_t v = 0; v < g_.size(); ++v) {
        if (g_.source(static_cast<int>(v)).is_unsaturable()) {
          out.q_index[v] = 0;
          entry_upper_[v] = -1;
        } else if (!g_.sink(static_cast<int>(v)).is_unsaturable()) {
          active.push_back(static_cast<int>(v));
        }
      }
      if (q > 0) bisect(lambdas, 0, q - 1, std::move(active), out.q_index);
    }

    out.set_sizes.assign(static_cast<std::size_t>(q), 0);
    for (int qi : out.q_index)
      if (qi < q) ++out.set_sizes[static_cast<std::size_t>(qi)];
    for (std::size_t k = 1; k < out.set_sizes.size(); ++k) out.set_sizes[k] += out.set_sizes[k - 1];
    return out;
  }

 private:
  struct Neighbor {
    int node;
    double out;  // capacity of this -> node
    double in;   // capacity of node -> this
  };

  CutResult make_result(double lambda, const std::vector<char>& side) const {
    CutResult r;
    r.lambda = lambda;
    for (std::size_t v = 0; v < side.size(); ++v)
      if (side[v]) r.source_set.push_back(static_cast<int>(v));
    const CutValue cv = cut_capacity(g_, lambda, side);
    r.value = cv.value;
    r.infinite = cv.infinite;
    return r;
  }

  // Lambdas lo..hi are undecided for `active`, whose crossing index lies in
  // [lo, hi + 1]. Inactive nodes sit in S for the whole range when
  // entry_upper_ < lo and in the sink set otherwise.
  void bisect(std::span<const double> lambdas, int lo, int hi, std::vector<int> active,
              std::vector<int>& q_index) const {
    if (active.empty()) return;
    if (lo > hi) {
      for (int v : active) q_index[static_cast<std::size_t>(v)] = lo;
      return;
    }
    const int mid = lo + (hi - lo) / 2;
    auto joined = solve_active(lambdas[static_cast<std::size_t>(mid)], active,
                               [&](int u) { return entry_upper_[static_cast<std::size_t>(u)] < lo; });
    for (int v : joined) entry_upper_[static_cast<std::size_t>(v)] = mid;
    std::vector<int> rest;
    rest.reserve(active.size() - joined.size());
    for (int v : active)
      if (entry_upper_[static_cast<std::size_t>(v)] != mid) rest.push_back(v);
    active.clear();
    active.shrink_to_fit();
    bisect(lambdas, mid + 1, hi, std::move(rest), q_index);
    bisect(lambdas, lo, mid - 1, std::move(joined), q_index);
  }

  // Minimal source set restricted to `active`; every other node is pinned to
  // the side reported by `in_source`.
  template <typename SideFn>
  std::vector<int> solve_active(double lambda, std::span<const int> active,
                                SideFn&& in_source) const {
    if (active.empty()) return {};
    for (std::size_t a = 0; a < active.size(); ++a)
      local_[static_cast<std::size_t>(active[a])] = static_cast<int>(a);

    MaxFlow flow(static_cast<int>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) {
      const int v = active[a];
      double src = g_.source(v).at(lambda);
      double snk = g_.sink(v).at(lambda);
      for (const Neighbor& nb : adj_[static_cast<std::size_t>(v)]) {
        const int lu = local_[static_cast<std::size_t>(nb.node)];
        if (lu >= 0) {
          if (static_cast<int>(a) < lu) flow.add_edge(static_cast<int>(a), lu, nb.out, nb.in);
        } else if (in_source(nb.node)) {
          src += nb.in;
        } else {
          snk += nb.out;
        }
      }
      // Flow min(src, snk) along s->v->t saturates nothing that matters for
      // reachability, so only the difference enters the network.
      const double common = std::min(src, snk);
      if (src - common > 0.0) flow.add_edge(flow.source(), static_cast<int>(a), src - common);
      if (snk - common > 0.0) flow.add_edge(static_cast<int>(a), flow.sink(), snk - common);
    }
    flow.solve();

    std::vector<int> joined;
    for (std::size_t a = 0; a < active.size(); ++a)
      if (flow.on_source_side(static_cast<int>(a))) joined.push_back(active[a]);
    for (int v : active) local_[static_cast<std::size_t>(v)] = -1;
    return joined;
  }

  const ParametricGraph& g_;
  std::vector<std::vector<Neighbor>> adj_;
  mutable std::vector<int> local_;
  mutable std::vector<int> entry_upper_;
};

inline CutResult min_cut(const ParametricGraph& g, double lambda) {
  return CutSolver(g).min_cut(lambda);
}

inline NestedCuts parametric_min_cut(const ParametricGraph& g, std::span<const double> lambdas,
                                     ParametricStrategy strategy = ParametricStrategy::bisection) {
  return CutSolver(g).parametric(lambdas, strategy);
}

/// Exhaustive minimum cut over all 2^n source sets (n <= 20). Returns the
/// intersection of all minimizers, which is the minimal minimum-cut source set.
inline CutResult brute_force_min_cut(const ParametricGraph& g, double lambda) {
  const std::size_t n = g.size();
  if (n > 20) config_error("brute force refused for more than 20 nodes");
  std::vector<char> in(n, 0);
  auto set_mask = [&](std::uint32_t mask) {
    for (std::size_t v = 0; v < n; ++v) in[v] = (mask >> v) & 1U;
  };

  const std::uint32_t n_sets = std::uint32_t{1} << n;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> values(n_sets);
  for (std::uint32_t mask = 0; mask < n_sets; ++mask) {
    set_mask(mask);
    const CutValue cv = cut_capacity(g, lambda, in);
    values[mask] = cv.infinite ? std::numeric_limits<double>::infinity() : cv.value;
    best = std::min(best, values[mask]);
  }

  CutResult r;
  r.lambda = lambda;
  if (std::isinf(best)) {
    r.infinite = true;
    r.value = best;
    return r;
  }
  std::uint32_t minimal = n_sets - 1;
  for (std::uint32_t mask = 0; mask < n_sets; ++mask)
    if (values[mask] <= best + 1e-9) minimal &= mask;
  for (std::size_t v = 0; v < n; ++v)
    if ((minimal >> v) & 1U) r.source_set.push_back(static_cast<int>(v));
  r.value = best;
  return r;
}

}  // namespace chnc
