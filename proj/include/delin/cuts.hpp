#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <span>
#include <vector>

#include "delin/lp/simplex.hpp"
#include "delin/mip_model.hpp"

namespace delin::detail {

/// Rooted connectivity inequalities over the arc variables: for a vertex set
/// S not containing the root and a target v in S,
///   x(in(S)) >= x(in(v))      (tree mode)
///   x(in(S)) >= x_b, b in in(v)  (subgraph mode)
/// Every feasible integral point satisfies them because selected arcs carry
/// flow from the root. Violated ones are found by max-flow on the LP point.
class ConnectivitySeparator {
 public:
  explicit ConnectivitySeparator(const MipModel& m) : m_(m) {}

  std::vector<lp::SparseRow> separate(std::span<const double> x, int max_cuts, double min_violation = 1e-4) {
    const auto& A = m_.arcs;
    const int n = m_.n_vertices;
    build(x);

    struct Target {
      VertexId v;
      double demand;
      int arc;  // subgraph mode: the in-arc defining the demand
    };
    std::vector<Target> targets;
    for (VertexId v = 0; v < n; ++v) {
      if (v == m_.root) continue;
      double demand = 0.0;
      int best = -1;
      for (int b : A.in(v)) {
        const double xb = x[static_cast<std::size_t>(b)];
        if (m_.mode == Mode::tree) {
          demand += xb;
        } else if (xb > demand) {
          demand = xb;
          best = b;
        }
      }
      if (demand > min_violation) targets.push_back({v, demand, best});
    }
    std::stable_sort(targets.begin(), targets.end(),
                     [](const Target& a, const Target& b) { return a.demand > b.demand; });

    std::vector<lp::SparseRow> cuts;
    std::vector<double> coef(static_cast<std::size_t>(m_.n_bin), 0.0);
    std::vector<int> touched;
    std::vector<std::vector<int>> seen_sets;
    for (const auto& t : targets) {
      if (static_cast<int>(cuts.size()) >= max_cuts) break;
      reset_capacities();
      // nested cuts: saturate each found cut and look for the next one
      for (int nest = 0; nest < max_nested_; ++nest) {
        const double flow = max_flow(m_.root, t.v, t.demand);
        if (flow >= t.demand - min_violation) break;
        const auto sink_side = reaching(t.v);
        touched.clear();
        for (int a = 0; a < m_.n_bin; ++a) {
          const auto& arc = A.arc(a);
          if (!sink_side[static_cast<std::size_t>(arc.tail)] && sink_side[static_cast<std::size_t>(arc.head)]) {
            coef[static_cast<std::size_t>(a)] += 1.0;
            touched.push_back(a);
          }
        }
        std::vector<int> cut_arcs = touched;
        if (m_.mode == Mode::tree) {
          for (int b : A.in(t.v)) {
            coef[static_cast<std::size_t>(b)] -= 1.0;
            touched.push_back(b);
          }
        } else {
          coef[static_cast<std::size_t>(t.arc)] -= 1.0;
          touched.push_back(t.arc);
        }
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        lp::SparseRow row;
        double lhs = 0.0;
        for (int a : touched) {
          const double c = coef[static_cast<std::size_t>(a)];
          coef[static_cast<std::size_t>(a)] = 0.0;
          if (c == 0.0) continue;
          row.idx.push_back(a);
          row.coef.push_back(c);
          lhs += c * x[static_cast<std::size_t>(a)];
        }
        if (lhs >= -min_violation) break;
        if (std::find(seen_sets.begin(), seen_sets.end(), row.idx) == seen_sets.end()) {
          seen_sets.push_back(row.idx);
          row.lo = 0.0;
          row.hi = std::numeric_limits<double>::infinity();
          cuts.push_back(std::move(row));
        }
        // raise the cut arcs to full capacity so the next cut lies further in
        for (int a : cut_arcs) raise(a, 1.0);
        reset_flow();
      }
    }
    return cuts;
  }

 private:
  struct FlowEdge {
    int to;
    int rev;
    double cap;
    double base;  // capacity for the current target
    double init;  // LP value
  };

  void build(std::span<const double> x) {
    const int n = m_.n_vertices;
    g_.assign(static_cast<std::size_t>(n), {});
    where_.assign(static_cast<std::size_t>(m_.n_bin), {-1, -1});
    for (int a = 0; a < m_.n_bin; ++a) {
      const double c = std::max(0.0, x[static_cast<std::size_t>(a)]);
      const auto& arc = m_.arcs.arc(a);
      if (arc.head == m_.root) continue;
      auto& from = g_[static_cast<std::size_t>(arc.tail)];
      auto& to = g_[static_cast<std::size_t>(arc.head)];
      where_[static_cast<std::size_t>(a)] = {arc.tail, static_cast<int>(from.size())};
      from.push_back({arc.head, static_cast<int>(to.size()), c, c, c});
      to.push_back({arc.tail, static_cast<int>(from.size()) - 1, 0.0, 0.0, 0.0});
    }
    level_.assign(static_cast<std::size_t>(n), -1);
    iter_.assign(static_cast<std::size_t>(n), 0);
  }

  void reset_capacities() {
    for (auto& edges : g_)
      for (auto& e : edges) e.base = e.init;
    reset_flow();
  }

  void reset_flow() {
    for (auto& edges : g_)
      for (auto& e : edges) e.cap = e.base;
  }

  void raise(int a, double c) {
    const auto [u, i] = where_[static_cast<std::size_t>(a)];
    if (u < 0) return;
    auto& e = g_[static_cast<std::size_t>(u)][static_cast<std::size_t>(i)];
    e.base = std::max(e.base, c);
  }

  bool bfs_levels(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> q{s};
    level_[static_cast<std::size_t>(s)] = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (const auto& e : g_[static_cast<std::size_t>(u)]) {
        if (e.cap > 1e-12 && level_[static_cast<std::size_t>(e.to)] < 0) {
          level_[static_cast<std::size_t>(e.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push_back(e.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  double augment(int u, int t, double f) {
    if (u == t) return f;
    auto& edges = g_[static_cast<std::size_t>(u)];
    for (int& i = iter_[static_cast<std::size_t>(u)]; i < static_cast<int>(edges.size()); ++i) {
      auto& e = edges[static_cast<std::size_t>(i)];
      if (e.cap <= 1e-12 || level_[static_cast<std::size_t>(e.to)] != level_[static_cast<std::size_t>(u)] + 1) continue;
      const double pushed = augment(e.to, t, std::min(f, e.cap));
      if (pushed > 0.0) {
        e.cap -= pushed;
        g_[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  /// Dinic from s to t, stopping once `enough` units are routed.
  double max_flow(int s, int t, double enough) {
    double flow = 0.0;
    while (flow < enough && bfs_levels(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      for (;;) {
        const double f = augment(s, t, std::numeric_limits<double>::infinity());
        if (f <= 0.0) break;
        flow += f;
        if (flow >= enough) break;
      }
    }
    return flow;
  }

  /// Vertices that can still reach t in the residual graph (the minimal sink side).
  std::vector<char> reaching(int t) const {
    std::vector<char> seen(g_.size(), 0);
    std::deque<int> q{t};
    seen[static_cast<std::size_t>(t)] = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      // residual arc w->u exists if the reverse entry stored at u has capacity on w's side
      for (const auto& e : g_[static_cast<std::size_t>(u)]) {
        const auto& back = g_[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(e.rev)];
        if (back.cap > 1e-12 && !seen[static_cast<std::size_t>(e.to)]) {
          seen[static_cast<std::size_t>(e.to)] = 1;
          q.push_back(e.to);
        }
      }
    }
    return seen;
  }

  const MipModel& m_;
  int max_nested_ = 8;
  std::vector<std::vector<FlowEdge>> g_;
  std::vector<std::pair<int, int>> where_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

}  // namespace delin::detail
