#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "chnc/error.hpp"
#include "chnc/paramcut.hpp"

namespace chnc {

// Text form of an s-t graph evaluated at one lambda:
//   p max <nodes> <arcs>      nodes include s and t
//   n <s-id> s
//   n <t-id> t
//   a <u> <v> <cap>           cap may be "inf"
// Internal node v is written as v + 1; s is n + 1 and t is n + 2.

inline void write_dimacs(std::ostream& out, const ParametricGraph& g, double lambda) {
  const int n = static_cast<int>(g.size());
  const int s = n + 1, t = n + 2;
  std::ostringstream arcs;
  std::size_t m = 0;
  char buf[96];
  auto emit = [&](int u, int v, const Capacity& c) {
    if (c.kind == CapacityKind::absent) return;
    if (c.is_unsaturable()) {
      std::snprintf(buf, sizeof buf, "a %d %d inf\n", u, v);
    } else {
      const double cap = c.at(lambda);
      if (cap <= 0.0) return;
      std::snprintf(buf, sizeof buf, "a %d %d %.17g\n", u, v, cap);
    }
    arcs << buf;
    ++m;
  };
  for (int v = 0; v < n; ++v) {
    emit(s, v + 1, g.source(v));
    emit(v + 1, t, g.sink(v));
  }
  for (const auto& a : g.arcs()) emit(a.from + 1, a.to + 1, Capacity::constant(a.capacity));
  out << "c lambda " << lambda << "\n";
  out << "p max " << n + 2 << ' ' << m << "\n";
  out << "n " << s << " s\n";
  out << "n " << t << " t\n";
  out << arcs.str();
}

/// Parses the text form into a graph with constant capacities. Node ids other
/// than s and t are renumbered to 0.. in increasing id order.
inline ParametricGraph read_dimacs(std::istream& in) {
  std::string line;
  int n_nodes = -1, s = -1, t = -1;
  std::size_t line_no = 0;
  struct Arc {
    int u, v;
    bool inf;
    double cap;
    std::size_t line;
  };
  std::vector<Arc> arcs;
  auto fail = [&](const std::string& msg) {
    data_error("dimacs line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag == "p") {
      std::string kind;
      long long m = 0;
      if (!(ls >> kind >> n_nodes >> m) || kind != "max" || n_nodes < 2)
        fail("expected 'p max <nodes> <arcs>'");
    } else if (tag == "n") {
      int id = 0;
      std::string role;
      if (!(ls >> id >> role)) fail("expected 'n <id> s|t'");
      if (role == "s")
        s = id;
      else if (role == "t")
        t = id;
      else
        fail("unknown node role '" + role + "'");
    } else if (tag == "a") {
      Arc a{0, 0, false, 0.0, line_no};
      std::string cap;
      if (!(ls >> a.u >> a.v >> cap)) fail("expected 'a <u> <v> <cap>'");
      if (cap == "inf") {
        a.inf = true;
      } else {
        try {
          std::size_t used = 0;
          a.cap = std::stod(cap, &used);
          if (used != cap.size()) throw std::invalid_argument(cap);
        } catch (const std::exception&) {
          fail("bad capacity '" + cap + "'");
        }
        if (!(a.cap >= 0.0) || !std::isfinite(a.cap)) fail("capacity must be finite and >= 0");
      }
      arcs.push_back(a);
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (n_nodes < 0) data_error("dimacs: missing problem line");
  if (s < 1 || t < 1 || s == t || s > n_nodes || t > n_nodes)
    data_error("dimacs: missing or invalid source/sink designation");

  std::vector<int> index(static_cast<std::size_t>(n_nodes) + 1, -1);
  int next = 0;
  for (int id = 1; id <= n_nodes; ++id)
    if (id != s && id != t) index[static_cast<std::size_t>(id)] = next++;

  ParametricGraph g(static_cast<std::size_t>(next));
  std::vector<double> src(static_cast<std::size_t>(next), 0.0), snk(src);
  std::vector<char> src_inf(src.size(), 0), snk_inf(src.size(), 0);
  for (const auto& a : arcs) {
    line_no = a.line;
    if (a.u < 1 || a.v < 1 || a.u > n_nodes || a.v > n_nodes) fail("node id out of range");
    if (a.u == a.v) fail("self loop");
    if (a.v == s || a.u == t) fail("arcs into s or out of t are not supported");
    if (a.u == s && a.v == t) fail("direct s-t arc is not supported");
    if (a.u == s) {
      const auto v = static_cast<std::size_t>(index[static_cast<std::size_t>(a.v)]);
      if (a.inf) src_inf[v] = 1; else src[v] += a.cap;
    } else if (a.v == t) {
      const auto u = static_cast<std::size_t>(index[static_cast<std::size_t>(a.u)]);
      if (a.inf) snk_inf[u] = 1; else snk[u] += a.cap;
    } else {
      if (a.inf) fail("unsaturable inner arcs are not supported");
      g.add_arc(index[static_cast<std::size_t>(a.u)], index[static_cast<std::size_t>(a.v)], a.cap);
    }
  }
  for (std::size_t v = 0; v < src.size(); ++v) {
    const int id = static_cast<int>(v);
    if (src_inf[v]) g.set_source(id, Capacity::unsaturable());
    else if (src[v] > 0.0) g.set_source(id, Capacity::constant(src[v]));
    if (snk_inf[v]) g.set_sink(id, Capacity::unsaturable());
    else if (snk[v] > 0.0) g.set_sink(id, Capacity::constant(snk[v]));
  }
  return g;
}

inline void write_dimacs_file(const std::string& path, const ParametricGraph& g, double lambda) {
  std::ofstream out(path);
  if (!out) data_error("cannot write " + path);
  write_dimacs(out, g, lambda);
  if (!out) data_error("write failed: " + path);
}

inline ParametricGraph read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) data_error("cannot open " + path);
  return read_dimacs(in);
}

}  // namespace chnc
