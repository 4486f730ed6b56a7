#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "chnc/error.hpp"

namespace chnc {

/// Residual capacities at or below this are treated as saturated.
inline constexpr double kFlowEpsilon = 1e-12;

/// Dinic max-flow on doubles. Nodes 0..n-1 are internal; source() and sink()
/// are appended. After solve(), on_source_side() is true for nodes reachable
/// from the source in the residual network: the minimal minimum-cut source set.
class MaxFlow {
 public:
  explicit MaxFlow(int n_internal) : n_(n_internal + 2) {}

  int source() const { return n_ - 2; }
  int sink() const { return n_ - 1; }

  void reserve(std::size_t n_edges) {
    from_.reserve(2 * n_edges);
    to_.reserve(2 * n_edges);
    cap_.reserve(2 * n_edges);
  }

  /// Adds u->v with capacity `cap` paired with v->u of capacity `rev_cap`.
  void add_edge(int u, int v, double cap, double rev_cap = 0.0) {
    require(cap >= 0.0 && rev_cap >= 0.0, "negative capacity");
    if (cap <= kFlowEpsilon && rev_cap <= kFlowEpsilon) return;
    from_.push_back(u);
    to_.push_back(v);
    cap_.push_back(cap);
    from_.push_back(v);
    to_.push_back(u);
    cap_.push_back(rev_cap);
  }

  double solve() {
    build_csr();
    double flow = 0.0;
    level_.assign(n_, -1);
    while (bfs()) flow += blocking_flow();
    return flow;
  }

  /// Valid after solve(): true for nodes reachable from the source.
  bool on_source_side(int v) const { return reach_[v] != 0; }

 private:
  void build_csr() {
    const std::size_t m = from_.size();
    start_.assign(n_ + 1, 0);
    for (int u : from_) ++start_[u + 1];
    for (int v = 0; v < n_; ++v) start_[v + 1] += start_[v];
    order_.resize(m);
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t e = 0; e < m; ++e) order_[fill[from_[e]]++] = static_cast<int>(e);
  }

  bool bfs() {
    std::fill(level_.begin(), level_.end(), -1);
    queue_.clear();
    level_[source()] = 0;
    queue_.push_back(source());
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int u = queue_[head];
      for (int k = start_[u]; k < start_[u + 1]; ++k) {
        const int e = order_[k];
        const int v = to_[e];
        if (level_[v] < 0 && cap_[e] > kFlowEpsilon) {
          level_[v] = level_[u] + 1;
          queue_.push_back(v);
        }
      }
    }
    if (level_[sink()] >= 0) return true;
    reach_.assign(n_, 0);
    for (int v = 0; v < n_; ++v) reach_[v] = level_[v] >= 0;
    return false;
  }

  double blocking_flow() {
    next_.assign(start_.begin(), start_.end() - 1);
    double total = 0.0;
    std::vector<int>& path = path_;  // arc ids from the source
    path.clear();
    int u = source();
    while (true) {
      if (u == sink()) {
        double bottleneck = std::numeric_limits<double>::infinity();
        for (int e : path) bottleneck = std::min(bottleneck, cap_[e]);
        std::size_t cut_at = path.size();
        for (std::size_t i = 0; i < path.size(); ++i) {
          const int e = path[i];
          cap_[e] -= bottleneck;
          cap_[e ^ 1] += bottleneck;
          if (cap_[e] <= kFlowEpsilon && cut_at == path.size()) cut_at = i;
        }
        total += bottleneck;
        path.resize(cut_at);
        u = path.empty() ? source() : to_[path.back()];
        continue;
      }
      bool advanced = false;
      for (; next_[u] < start_[u + 1]; ++next_[u]) {
        const int e = order_[next_[u]];
        const int v = to_[e];
        if (cap_[e] > kFlowEpsilon && level_[v] == level_[u] + 1) {
          path.push_back(e);
          u = v;
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      if (u == source()) break;
      level_[u] = -1;  // dead end for this phase
      path.pop_back();
      u = path.empty() ? source() : to_[path.back()];
      ++next_[u];
    }
    return total;
  }

  int n_;
  std::vector<int> from_, to_;
  std::vector<double> cap_;
  std::vector<int> start_, order_, next_;
  std::vector<int> level_, queue_, path_;
  std::vector<char> reach_;
};

}  // namespace chnc
