#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <thread>
#include <vector>

#include "delin/error.hpp"
#include "delin/graph.hpp"
#include "delin/solver.hpp"

namespace delin {

inline constexpr double kTopoEpsilon = 0.01;

struct WeightStats {
  double A = 0.0;  // 10% quantile
  double B = 0.0;  // 90% quantile
};

/// Quantile with linear interpolation between order statistics, h = (n-1)p.
inline double quantile(std::vector<double> values, double p) {
  if (values.empty()) fail(ErrorCode::invalid_argument, "quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline WeightStats weight_stats(std::span<const double> W) {
  if (W.empty()) fail(ErrorCode::invalid_argument, "weight_stats: empty weight set");
  std::vector<double> v(W.begin(), W.end());
  return {quantile(v, 0.10), quantile(v, 0.90)};
}

/// Moves a weight to the opposite class: positives (w >= 0) towards A,
/// negatives towards B.
inline double transform_weight(double w, const WeightStats& s) { return w >= 0.0 ? s.A + w : s.B + w; }

struct AttentionScore {
  EdgeId edge = 0;
  double w = 0.0;
  double w_prime = 0.0;
  double delta_c = 0.0;
  double topo = 1.0;
  double s = 0.0;
  bool special_case = false;
  double r_prime_cost = 0.0;
  std::vector<EdgeId> r_prime;  // empty for the special case
};

/// Solves the probe problem (weights W' on G) given the base optimum as a warm start.
using ProbeSolver =
    std::function<Reconstruction(const Graph& g, Mode mode, std::span<const double> W, const Reconstruction& warm)>;

struct AttentionOptions {
  SolveOptions solve;
  int workers = 1;       // concurrent probes
  ProbeSolver probe;     // defaults to branch and bound on the compact model
  std::optional<WeightStats> stats;  // computed from W when absent
};

namespace detail {

inline Reconstruction default_probe(const Graph& g, Mode mode, std::span<const double> W, const Reconstruction& warm,
                                    const SolveOptions& base) {
  SolveOptions o = base;
  o.parallel_workers = 1;
  o.warm_start = warm;
  return solve(build_compact(g, mode, W), o).reconstruction;
}

inline void check_base(const Graph& g, std::span<const double> W, const Reconstruction& R_star) {
  if (W.size() != static_cast<std::size_t>(g.n_edges())) {
    fail(ErrorCode::invalid_argument, "weight map size does not match edge count");
  }
  if (R_star.status != SolveStatus::optimal) {
    fail(ErrorCode::precondition, "base reconstruction is not optimal (status " +
                                      std::string(to_string(R_star.status)) + ")");
  }
}

/// Hop distances from s inside the subgraph R (adjacency given), -1 if unreachable.
inline std::vector<int> hops(const std::vector<std::vector<VertexId>>& adj, VertexId s) {
  std::vector<int> d(adj.size(), -1);
  std::deque<VertexId> q{s};
  d[static_cast<std::size_t>(s)] = 0;
  while (!q.empty()) {
    const VertexId u = q.front();
    q.pop_front();
    for (VertexId v : adj[static_cast<std::size_t>(u)]) {
      if (d[static_cast<std::size_t>(v)] < 0) {
        d[static_cast<std::size_t>(v)] = d[static_cast<std::size_t>(u)] + 1;
        q.push_back(v);
      }
    }
  }
  return d;
}

inline std::vector<std::vector<VertexId>> sub_adjacency(std::span<const EdgeId> R, const Graph& G) {
  std::vector<std::vector<VertexId>> adj(static_cast<std::size_t>(G.n_vertices()));
  for (EdgeId e : R) {
    const auto& ed = G.edge(e);
    adj[static_cast<std::size_t>(ed.u)].push_back(ed.v);
    adj[static_cast<std::size_t>(ed.v)].push_back(ed.u);
  }
  return adj;
}

/// Runs f(i) for i in [0, n) on up to `workers` threads; rethrows the first failure.
template <class F>
void parallel_for(int n, int workers, F&& f) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Edge Jaccard plus agreement of pairwise hop distances, clamped to [eps, 1].
inline double topology_score(std::span<const EdgeId> R1, std::span<const EdgeId> R2, const Graph& G) {
  const auto a = normalized({R1.begin(), R1.end()});
  const auto b = normalized({R2.begin(), R2.end()});
  std::vector<EdgeId> both, either;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(either));
  const double J = either.empty() ? 1.0 : static_cast<double>(both.size()) / static_cast<double>(either.size());

  const auto va = spanned_vertices(a, G);
  const auto vb = spanned_vertices(b, G);
  std::vector<VertexId> common, all;
  std::set_intersection(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(common));
  std::set_union(va.begin(), va.end(), vb.begin(), vb.end(), std::back_inserter(all));

  double P = 0.0;
  if (common.size() < 2) {
    P = all.size() < 2 ? 1.0 : 0.0;
  } else {
    const auto adj_a = detail::sub_adjacency(a, G);
    const auto adj_b = detail::sub_adjacency(b, G);
    long long agree = 0, pairs = 0;
    for (std::size_t i = 0; i < common.size(); ++i) {
      const auto da = detail::hops(adj_a, common[i]);
      const auto db = detail::hops(adj_b, common[i]);
      for (std::size_t j = i + 1; j < common.size(); ++j) {
        const int x = da[static_cast<std::size_t>(common[j])];
        const int y = db[static_cast<std::size_t>(common[j])];
        ++pairs;
        if (x < 0 || y < 0) continue;
        if (std::abs(x - y) <= 0.2 * std::max(x, y)) ++agree;
      }
    }
    P = static_cast<double>(agree) / static_cast<double>(pairs);
  }
  return std::clamp(0.5 * J + 0.5 * P, kTopoEpsilon, 1.0);
}

inline double topology_score(const Reconstruction& R1, const Reconstruction& R2, const Graph& G) {
  return topology_score(R1.edges, R2.edges, G);
}

/// Change in delineation cost when edge e's weight is moved to the other class.
/// Fills the delta fields; topo and s are left at their defaults.
inline AttentionScore delta_cost(const Graph& G, Mode mode, std::span<const double> W, const Reconstruction& R_star,
                                 EdgeId e, const AttentionOptions& opt = {}) {
  detail::check_base(G, W, R_star);
  if (e < 0 || e >= G.n_edges()) fail(ErrorCode::not_found, "unknown edge id " + std::to_string(e));
  const auto stats = opt.stats ? *opt.stats : weight_stats(W);
  AttentionScore sc;
  sc.edge = e;
  sc.w = W[static_cast<std::size_t>(e)];
  sc.w_prime = transform_weight(sc.w, stats);
  const bool inside = R_star.contains(e);
  if (sc.w < 0.0 && !inside) {
    sc.special_case = true;
    sc.delta_c = sc.w_prime;
    sc.r_prime_cost = std::numeric_limits<double>::quiet_NaN();
    return sc;
  }
  std::vector<double> Wp(W.begin(), W.end());
  Wp[static_cast<std::size_t>(e)] = sc.w_prime;
  const double base = cost(R_star.edges, W);
  // lowering an edge inside the optimum, or raising one outside it, keeps R* optimal
  if ((inside && sc.w_prime <= sc.w) || (!inside && sc.w_prime >= sc.w)) {
    sc.r_prime = R_star.edges;
  } else if (opt.probe) {
    sc.r_prime = opt.probe(G, mode, Wp, R_star).edges;
  } else {
    sc.r_prime = detail::default_probe(G, mode, Wp, R_star, opt.solve).edges;
  }
  sc.r_prime_cost = cost(sc.r_prime, Wp);
  sc.delta_c = base - sc.r_prime_cost;
  return sc;
}

/// Combined proofreading score s = delta_c / topology(R*, R').
inline AttentionScore proofread_score(const Graph& G, Mode mode, std::span<const double> W,
                                      const Reconstruction& R_star, EdgeId e, const AttentionOptions& opt = {}) {
  auto sc = delta_cost(G, mode, W, R_star, e, opt);
  sc.topo = sc.special_case ? kTopoEpsilon : topology_score(R_star.edges, sc.r_prime, G);
  sc.s = sc.delta_c / sc.topo;
  return sc;
}

/// Scores for the given candidate edges (all edges when empty), probes run in parallel.
inline std::vector<AttentionScore> score_edges(const Graph& G, Mode mode, std::span<const double> W,
                                               const Reconstruction& R_star, std::span<const EdgeId> candidates = {},
                                               const AttentionOptions& opt = {}) {
  detail::check_base(G, W, R_star);
  std::vector<EdgeId> ids(candidates.begin(), candidates.end());
  if (candidates.empty()) {
    ids.resize(static_cast<std::size_t>(G.n_edges()));
    std::iota(ids.begin(), ids.end(), 0);
  }
  auto o = opt;
  if (!o.stats) o.stats = weight_stats(W);
  std::vector<AttentionScore> out(ids.size());
  detail::parallel_for(static_cast<int>(ids.size()), o.workers, [&](int i) {
    out[static_cast<std::size_t>(i)] = proofread_score(G, mode, W, R_star, ids[static_cast<std::size_t>(i)], o);
  });
  return out;
}

enum class RankKey { delta_c, s };

/// Top-k edge ids by key, descending; ties by ascending id.
inline std::vector<EdgeId> rank_edges(std::span<const AttentionScore> scores, RankKey key, int k) {
  if (k < 1) fail(ErrorCode::invalid_argument, "rank_edges: k must be >= 1");
  std::vector<const AttentionScore*> order;
  order.reserve(scores.size());
  for (const auto& s : scores) order.push_back(&s);
  auto value = [key](const AttentionScore* s) { return key == RankKey::s ? s->s : s->delta_c; };
  std::sort(order.begin(), order.end(), [&](const AttentionScore* a, const AttentionScore* b) {
    const double x = value(a), y = value(b);
    if (x != y) return x > y;
    return a->edge < b->edge;
  });
  std::vector<EdgeId> ids;
  for (std::size_t i = 0; i < order.size() && static_cast<int>(i) < k; ++i) ids.push_back(order[i]->edge);
  return ids;
}

inline void write_scores_csv(std::ostream& os, std::span<const AttentionScore> scores) {
  os << "edge_id,w,w_prime,delta_c,topo,s,special_case\n";
  os.precision(17);
  for (const auto& s : scores) {
    os << s.edge << ',' << s.w << ',' << s.w_prime << ',' << s.delta_c << ',' << s.topo << ',' << s.s << ','
       << (s.special_case ? "true" : "false") << '\n';
  }
}

}  // namespace delin
