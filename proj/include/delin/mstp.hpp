#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "delin/graph.hpp"

namespace delin {

/// Parent pointers of a tree rooted at r, with pruned-subtree costs.
struct RootedTree {
  VertexId root = 0;
  std::vector<EdgeId> parent_edge;  // -1 for the root and unspanned vertices
  std::vector<double> subtree_cost; // pc(parent edge of v); NaN where undefined
  std::vector<VertexId> order;      // BFS order from the root
};

namespace detail {

struct EdgeEnds {
  VertexId u;
  VertexId v;
};

/// MST of the component containing `root` (Kruskal, ties by edge id),
/// restricted to edges with allowed[e] != 0, rooted at `root`.
inline RootedTree rooted_mst(int n_vertices, VertexId root, std::span<const EdgeEnds> ends,
                             std::span<const double> w, std::span<const char> allowed) {
  std::vector<EdgeId> order;
  for (EdgeId e = 0; e < static_cast<EdgeId>(ends.size()); ++e)
    if (allowed.empty() || allowed[static_cast<std::size_t>(e)]) order.push_back(e);
  std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    return w[static_cast<std::size_t>(a)] < w[static_cast<std::size_t>(b)];
  });
  DisjointSets dsu(n_vertices);
  std::vector<std::vector<EdgeId>> adj(static_cast<std::size_t>(n_vertices));
  for (EdgeId e : order) {
    const auto& ed = ends[static_cast<std::size_t>(e)];
    if (dsu.unite(ed.u, ed.v)) {
      adj[static_cast<std::size_t>(ed.u)].push_back(e);
      adj[static_cast<std::size_t>(ed.v)].push_back(e);
    }
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  RootedTree t;
  t.root = root;
  t.parent_edge.assign(static_cast<std::size_t>(n_vertices), -1);
  t.subtree_cost.assign(static_cast<std::size_t>(n_vertices), std::numeric_limits<double>::quiet_NaN());
  std::vector<char> seen(static_cast<std::size_t>(n_vertices), 0);
  std::deque<VertexId> queue{root};
  seen[static_cast<std::size_t>(root)] = 1;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    t.order.push_back(u);
    for (EdgeId e : adj[static_cast<std::size_t>(u)]) {
      const auto& ed = ends[static_cast<std::size_t>(e)];
      const VertexId v = ed.u == u ? ed.v : ed.u;
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      t.parent_edge[static_cast<std::size_t>(v)] = e;
      queue.push_back(v);
    }
  }
  return t;
}

/// Bottom-up pruned costs, then top-down selection of edges with pc < 0
/// whose parent edge survives.
inline std::vector<EdgeId> prune(RootedTree& t, std::span<const EdgeEnds> ends, std::span<const double> w) {
  for (auto it = t.order.rbegin(); it != t.order.rend(); ++it) {
    const VertexId v = *it;
    const EdgeId e = t.parent_edge[static_cast<std::size_t>(v)];
    if (e < 0) continue;
    double& pc = t.subtree_cost[static_cast<std::size_t>(v)];
    pc = w[static_cast<std::size_t>(e)] + (std::isnan(pc) ? 0.0 : pc);
    const auto& ed = ends[static_cast<std::size_t>(e)];
    const VertexId parent = ed.u == v ? ed.v : ed.u;
    if (parent != t.root && pc < 0.0) {
      double& acc = t.subtree_cost[static_cast<std::size_t>(parent)];
      acc = (std::isnan(acc) ? 0.0 : acc) + pc;
    }
  }
  // subtree_cost[v] accumulated child contributions before its own edge was
  // added; the reverse BFS order guarantees children are finished first.
  std::vector<char> kept(t.parent_edge.size(), 0);
  std::vector<EdgeId> out;
  for (VertexId v : t.order) {
    const EdgeId e = t.parent_edge[static_cast<std::size_t>(v)];
    if (e < 0) continue;
    const auto& ed = ends[static_cast<std::size_t>(e)];
    const VertexId parent = ed.u == v ? ed.v : ed.u;
    const bool parent_ok = parent == t.root || kept[static_cast<std::size_t>(parent)];
    if (parent_ok && t.subtree_cost[static_cast<std::size_t>(v)] < 0.0) {
      kept[static_cast<std::size_t>(v)] = 1;
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<EdgeEnds> edge_ends(const Graph& g) {
  std::vector<EdgeEnds> ends;
  ends.reserve(static_cast<std::size_t>(g.n_edges()));
  for (const auto& e : g.edges()) ends.push_back({e.u, e.v});
  return ends;
}

inline std::vector<EdgeId> mst_prune_edges(int n_vertices, VertexId root, std::span<const EdgeEnds> ends,
                                           std::span<const double> w, std::span<const char> allowed = {}) {
  auto t = rooted_mst(n_vertices, root, ends, w, allowed);
  return prune(t, ends, w);
}

}  // namespace detail

/// The rooted MST of the root's component with pruned-subtree costs filled in.
inline RootedTree rooted_pruned_tree(const Graph& g, std::span<const double> w) {
  const auto ends = detail::edge_ends(g);
  auto t = detail::rooted_mst(g.n_vertices(), g.root(), ends, w, {});
  detail::prune(t, ends, w);
  return t;
}

/// Minimum spanning tree with pruning: keeps every MST edge whose pruned
/// subtree cost is negative (pc = 0 is pruned). Always a valid tree.
inline Reconstruction mst_prune(const Graph& g, std::span<const double> weights = {}) {
  const auto w = weights.empty() ? g.weights() : std::vector<double>(weights.begin(), weights.end());
  const auto ends = detail::edge_ends(g);
  Reconstruction r;
  r.mode = Mode::tree;
  r.edges = detail::mst_prune_edges(g.n_vertices(), g.root(), ends, w);
  r.cost = cost(r.edges, w);
  r.status = SolveStatus::feasible_with_gap;
  double lb = 0.0;
  for (double x : w) lb += std::min(0.0, x);
  r.bound = lb;
  return r;
}

}  // namespace delin
