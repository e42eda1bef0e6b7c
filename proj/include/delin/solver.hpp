#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <thread>
#include <vector>

#include "delin/cuts.hpp"
#include "delin/error.hpp"
#include "delin/graph.hpp"
#include "delin/lp/simplex.hpp"
#include "delin/mip_model.hpp"
#include "delin/mstp.hpp"

namespace delin {

enum class LpBackend { dual_simplex, none };

inline std::string_view to_string(LpBackend b) { return b == LpBackend::dual_simplex ? "dual_simplex" : "none"; }

inline LpBackend parse_lp_backend(std::string_view s) {
  if (s == "dual_simplex") return LpBackend::dual_simplex;
  if (s == "none") return LpBackend::none;
  fail(ErrorCode::invalid_argument, "unknown lp backend '" + std::string(s) + "' (expected dual_simplex|none)");
}

struct SolveOptions {
  std::optional<double> time_limit;  // seconds
  std::optional<Reconstruction> warm_start;
  double absolute_gap_tolerance = 1e-6;
  std::optional<long long> node_limit;
  int parallel_workers = 1;
  LpBackend lp = LpBackend::dual_simplex;
  bool heuristics = true;
  bool cuts = true;  // rooted connectivity cuts at every node
};

struct SolveResult {
  Reconstruction reconstruction;
  double best_bound = 0.0;
  long long nodes_explored = 0;
  double wall_time = 0.0;
  long long lp_iterations = 0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::shared_ptr<const lp::Problem> lp_problem(const MipModel& m, std::span<const double> lo,
                                                     std::span<const double> hi) {
  auto P = std::make_shared<lp::Problem>(m.objective, std::vector<double>(lo.begin(), lo.end()),
                                         std::vector<double>(hi.begin(), hi.end()));
  for (const auto& r : m.rows) P->add_row(r.idx, r.coef, r.lo, r.hi);
  P->finalize();
  return P;
}

/// Extends a valid reconstruction greedily with negative edges that keep it
/// valid: one new endpoint in tree mode, either in subgraph mode.
inline std::vector<EdgeId> extend_negative(const MipModel& m, std::vector<EdgeId> R) {
  const auto& A = m.arcs;
  std::vector<char> in_r(static_cast<std::size_t>(m.n_edges), 0), spanned(static_cast<std::size_t>(m.n_vertices), 0);
  spanned[static_cast<std::size_t>(m.root)] = 1;
  for (EdgeId e : R) {
    in_r[static_cast<std::size_t>(e)] = 1;
    spanned[static_cast<std::size_t>(A.arc(2 * e).tail)] = 1;
    spanned[static_cast<std::size_t>(A.arc(2 * e).head)] = 1;
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (EdgeId e = 0; e < m.n_edges; ++e) {
      if (in_r[static_cast<std::size_t>(e)] || !(m.edge_weights[static_cast<std::size_t>(e)] < 0.0)) continue;
      const auto& arc = A.arc(2 * e);
      const int ends = spanned[static_cast<std::size_t>(arc.tail)] + spanned[static_cast<std::size_t>(arc.head)];
      const bool ok = m.mode == Mode::tree ? ends == 1 : ends >= 1;
      if (!ok) continue;
      in_r[static_cast<std::size_t>(e)] = 1;
      spanned[static_cast<std::size_t>(arc.tail)] = 1;
      spanned[static_cast<std::size_t>(arc.head)] = 1;
      R.push_back(e);
      grew = true;
    }
  }
  std::sort(R.begin(), R.end());
  return R;
}

inline std::vector<EdgeEnds> model_ends(const MipModel& m) {
  std::vector<EdgeEnds> ends(static_cast<std::size_t>(m.n_edges));
  for (EdgeId e = 0; e < m.n_edges; ++e) ends[static_cast<std::size_t>(e)] = {m.arcs.arc(2 * e).tail, m.arcs.arc(2 * e).head};
  return ends;
}

/// Pruned MST over the allowed edges, extended with negative edges.
inline std::vector<EdgeId> tree_heuristic(const MipModel& m, std::span<const char> allowed) {
  const auto ends = model_ends(m);
  auto R = mst_prune_edges(m.n_vertices, m.root, ends, m.edge_weights, allowed);
  return extend_negative(m, std::move(R));
}

/// Checks R against the model by encoding it and evaluating every row.
inline bool model_accepts(const MipModel& m, std::span<const EdgeId> R) {
  for (EdgeId e : R)
    if (e < 0 || e >= m.n_edges) return false;
  try {
    const auto values = encode(m, R);
    return check_feasible(m, values).ok;
  } catch (const Error&) {
    return false;
  }
}

struct Node {
  double bound = -std::numeric_limits<double>::infinity();
  long long seq = 0;
  std::vector<std::pair<int, std::uint8_t>> fixings;
  std::shared_ptr<const lp::Basis> basis;
};

struct NodeAfter {
  bool operator()(const std::unique_ptr<Node>& a, const std::unique_ptr<Node>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;
    return a->seq > b->seq;
  }
};

/// Best-first branch and bound on the LP relaxation. Nodes are ordered by
/// bound, then creation order, so a single worker is deterministic.
class BranchAndBound {
 public:
  BranchAndBound(const MipModel& m, const SolveOptions& opt) : m_(m), opt_(opt) {
    t0_ = Clock::now();
    deadline_ = opt.time_limit ? t0_ + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(std::max(0.0, *opt.time_limit)))
                               : Clock::time_point::max();
    root_lo_ = m.lower;
    root_hi_ = m.upper;
    // arcs into the root can never be selected
    for (int a : m.arcs.in(m.root)) root_hi_[static_cast<std::size_t>(a)] = 0.0;
  }

  SolveResult run() {
    offer({}, 0.0);
    if (opt_.warm_start) {
      const auto R = normalized(opt_.warm_start->edges);
      if (!model_accepts(m_, R)) {
        fail(ErrorCode::warm_start_rejected, "warm start is not a valid " + std::string(to_string(m_.mode)) +
                                                 " reconstruction for this model");
      }
      offer(R, cost(R, m_.edge_weights));
    }
    if (opt_.heuristics) {
      const auto R = tree_heuristic(m_, {});
      if (model_accepts(m_, R)) offer(R, cost(R, m_.edge_weights));
    }
    problem_ = lp_problem(m_, root_lo_, root_hi_);
    double trivial = 0.0;
    for (double w : m_.edge_weights) trivial += std::min(0.0, w);
    queue_.push(std::make_unique<Node>(Node{trivial, seq_++, {}, nullptr}));

    const int workers = std::max(1, opt_.parallel_workers);
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int i = 0; i < workers; ++i) pool.emplace_back([this] { worker(); });
      for (auto& t : pool) t.join();
    }
    if (error_) std::rethrow_exception(error_);
    return result();
  }

 private:
  void offer(std::vector<EdgeId> R, double c) {
    if (!have_incumbent_ || c < inc_cost_ - 1e-12) {
      inc_cost_ = c;
      inc_ = std::move(R);
      have_incumbent_ = true;
    }
  }

  double cutoff() const { return inc_cost_ - opt_.absolute_gap_tolerance; }

  struct WorkerState {
    std::unique_ptr<lp::LinearSolver> solver;
    std::optional<ConnectivitySeparator> separator;
    std::vector<double> lo, hi;
    std::shared_ptr<const lp::Basis> last;
    std::size_t cuts_seen = 0;
    long long iterations_seen = 0;
  };

  void worker() {
    WorkerState w;
    if (opt_.lp == LpBackend::dual_simplex) {
      w.solver = std::make_unique<lp::DualSimplex>();
      w.solver->load(problem_);
      if (opt_.cuts) w.separator.emplace(m_);
    }
    w.lo = root_lo_;
    w.hi = root_hi_;
    try {
      for (;;) {
        std::unique_ptr<Node> node;
        {
          std::unique_lock lock(mu_);
          cv_.wait(lock, [&] { return stop_ || !queue_.empty() || active_ == 0; });
          if (stop_ || queue_.empty()) {
            cv_.notify_all();
            return;
          }
          node = std::move(const_cast<std::unique_ptr<Node>&>(queue_.top()));
          queue_.pop();
          if (node->bound >= cutoff()) {
            pruned_min_ = std::min(pruned_min_, node->bound);
            cv_.notify_all();
            continue;
          }
          if (opt_.node_limit && explored_ >= *opt_.node_limit) {
            queue_.push(std::move(node));
            stop_ = true;
            cv_.notify_all();
            return;
          }
          ++explored_;
          ++active_;
        }
        auto children = opt_.lp == LpBackend::none ? expand_combinatorial(*node) : expand(*node, w);
        {
          std::lock_guard lock(mu_);
          --active_;
          if (children.timed_out) {
            queue_.push(std::move(node));
            stop_ = true;
            timed_out_ = true;
          }
          for (auto& c : children.nodes) {
            c->seq = seq_++;
            queue_.push(std::move(c));
          }
          cv_.notify_all();
        }
      }
    } catch (...) {
      std::lock_guard lock(mu_);
      if (!error_) error_ = std::current_exception();
      stop_ = true;
      --active_;
      cv_.notify_all();
    }
  }

  struct Expansion {
    std::vector<std::unique_ptr<Node>> nodes;
    bool timed_out = false;
  };

  void apply_bounds(const Node& node, lp::LinearSolver& solver, std::vector<double>& lo, std::vector<double>& hi) {
    std::vector<double> want_lo(root_lo_.begin(), root_lo_.begin() + m_.n_bin);
    std::vector<double> want_hi(root_hi_.begin(), root_hi_.begin() + m_.n_bin);
    for (const auto& [j, v] : node.fixings) {
      want_lo[static_cast<std::size_t>(j)] = v;
      want_hi[static_cast<std::size_t>(j)] = v;
    }
    for (int j = 0; j < m_.n_bin; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (want_lo[u] != lo[u] || want_hi[u] != hi[u]) {
        lo[u] = want_lo[u];
        hi[u] = want_hi[u];
        solver.set_col_bounds(j, lo[u], hi[u]);
      }
    }
  }

  /// Pulls cuts found by any worker into this worker's relaxation.
  void sync_cuts(WorkerState& w) {
    std::vector<lp::SparseRow> fresh;
    {
      std::lock_guard lock(mu_);
      fresh.assign(cut_pool_.begin() + static_cast<std::ptrdiff_t>(w.cuts_seen), cut_pool_.end());
      w.cuts_seen = cut_pool_.size();
    }
    w.solver->add_rows(fresh);
  }

  lp::Status solve_relaxation(const Node& node, WorkerState& w) {
    auto status = w.solver->solve(deadline_);
    if (status == lp::Status::numerical_failure) {
      w.solver->set_basis(nullptr);
      status = w.solver->solve(deadline_);
    }
    {
      std::lock_guard lock(mu_);
      lp_iterations_ += w.solver->iterations() - w.iterations_seen;
    }
    w.iterations_seen = w.solver->iterations();
    if (status == lp::Status::numerical_failure || status == lp::Status::iteration_limit) {
      fail(ErrorCode::solver_numerics, "LP relaxation failed at node " + std::to_string(node.seq) + " (depth " +
                                           std::to_string(node.fixings.size()) + ", status " +
                                           std::string(lp::to_string(status)) + ")");
    }
    return status;
  }

  Expansion expand(const Node& node, WorkerState& w) {
    Expansion out;
    auto& solver = *w.solver;
    auto& lo = w.lo;
    auto& hi = w.hi;
    apply_bounds(node, solver, lo, hi);
    if (node.basis && node.basis != w.last) solver.set_basis(node.basis);
    if (w.separator) sync_cuts(w);

    const int max_rounds = node.seq == 0 ? 200 : 20;
    double lb = node.bound;
    double cut = 0.0;
    int stalled = 0;
    for (int round = 0;; ++round) {
      const auto status = solve_relaxation(node, w);
      if (status == lp::Status::time_limit) {
        out.timed_out = true;
        return out;
      }
      if (status == lp::Status::infeasible) return out;
      const double prev = lb;
      lb = std::max(node.bound, solver.lower_bound());
      {
        std::lock_guard lock(mu_);
        cut = cutoff();
      }
      if (lb >= cut) {
        std::lock_guard lock(mu_);
        pruned_min_ = std::min(pruned_min_, lb);
        return out;
      }
      if (!w.separator || round >= max_rounds) break;
      stalled = lb - prev < 1e-6 * (1.0 + std::abs(lb)) ? stalled + 1 : 0;
      if (round > 0 && stalled >= 5) break;
      const auto x = solver.primal();
      bool fractional = false;
      for (int j = 0; j < m_.n_bin && !fractional; ++j) {
        const double v = x[static_cast<std::size_t>(j)];
        fractional = std::min(v - std::floor(v), std::ceil(v) - v) > 1e-6;
      }
      if (!fractional) break;
      auto rows = w.separator->separate(x, 2000);
      if (rows.empty()) break;
      {
        std::lock_guard lock(mu_);
        for (auto& r : rows) cut_pool_.push_back(r);
      }
      sync_cuts(w);
    }
    const auto x = solver.primal();
    const auto basis = solver.basis();
    w.last = basis;

    if (opt_.heuristics && (node.seq % 64 == 0)) {
      std::vector<char> allowed(static_cast<std::size_t>(m_.n_edges), 0);
      for (EdgeId e = 0; e < m_.n_edges; ++e) {
        allowed[static_cast<std::size_t>(e)] =
            x[static_cast<std::size_t>(2 * e)] + x[static_cast<std::size_t>(2 * e + 1)] > 1e-6;
      }
      const auto R = tree_heuristic(m_, allowed);
      if (model_accepts(m_, R)) {
        std::lock_guard lock(mu_);
        offer(R, cost(R, m_.edge_weights));
        cut = cutoff();
      }
    }

    int branch = -1;
    double best_frac = 1e-6;
    for (int j = 0; j < m_.n_bin; ++j) {
      const double v = x[static_cast<std::size_t>(j)];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac) {
        best_frac = frac;
        branch = j;
      }
    }
    if (branch < 0) {
      std::vector<double> rounded(x.begin(), x.end());
      for (int j = 0; j < m_.n_bin; ++j) rounded[static_cast<std::size_t>(j)] = std::round(rounded[static_cast<std::size_t>(j)]);
      const auto R = decode(m_, rounded);
      if (!model_accepts(m_, R)) {
        fail(ErrorCode::solver_numerics, "integral relaxation point does not decode to a valid reconstruction");
      }
      std::lock_guard lock(mu_);
      offer(R, cost(R, m_.edge_weights));
      pruned_min_ = std::min(pruned_min_, lb);
      return out;
    }

    // reduced-cost fixing against the incumbent
    auto fixings = node.fixings;
    const auto d = solver.reduced_costs();
    for (int j = 0; j < m_.n_bin; ++j) {
      const auto u = static_cast<std::size_t>(j);
      if (lo[u] == hi[u] || j == branch) continue;
      const double dj = d[u];
      if (dj > 0.0 && lb + dj * (hi[u] - lo[u]) >= cut + 1e-9) {
        fixings.emplace_back(j, static_cast<std::uint8_t>(lo[u]));
      } else if (dj < 0.0 && lb - dj * (hi[u] - lo[u]) >= cut + 1e-9) {
        fixings.emplace_back(j, static_cast<std::uint8_t>(hi[u]));
      }
    }
    for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
      auto child = std::make_unique<Node>();
      child->bound = lb;
      child->fixings = fixings;
      child->fixings.emplace_back(branch, v);
      child->basis = basis;
      out.nodes.push_back(std::move(child));
    }
    return out;
  }

  /// Search without a relaxation: branches on edges (both arcs at once) and
  /// bounds by fixed cost plus the negative part of the free edges.
  Expansion expand_combinatorial(const Node& node) {
    Expansion out;
    if (Clock::now() >= deadline_) {
      out.timed_out = true;
      return out;
    }
    // fixings index edges here; value 1 means the edge is selected
    std::vector<int> state(static_cast<std::size_t>(m_.n_edges), -1);
    for (const auto& [e, v] : node.fixings) state[static_cast<std::size_t>(e)] = v;
    double lb = 0.0;
    int free_edge = -1;
    std::vector<EdgeId> chosen;
    for (EdgeId e = 0; e < m_.n_edges; ++e) {
      const double w = m_.edge_weights[static_cast<std::size_t>(e)];
      const int s = state[static_cast<std::size_t>(e)];
      if (s == 1) {
        lb += w;
        chosen.push_back(e);
      } else if (s == -1) {
        lb += std::min(0.0, w);
        if (free_edge < 0) free_edge = e;
      }
    }
    std::lock_guard lock(mu_);
    lb = std::max(lb, node.bound);
    if (lb >= cutoff()) {
      pruned_min_ = std::min(pruned_min_, lb);
      return out;
    }
    if (free_edge < 0) {
      if (model_accepts(m_, chosen)) offer(chosen, cost(chosen, m_.edge_weights));
      pruned_min_ = std::min(pruned_min_, lb);
      return out;
    }
    for (std::uint8_t v : {std::uint8_t{1}, std::uint8_t{0}}) {
      auto child = std::make_unique<Node>();
      child->bound = lb;
      child->fixings = node.fixings;
      child->fixings.emplace_back(free_edge, v);
      out.nodes.push_back(std::move(child));
    }
    return out;
  }

  SolveResult result() {
    SolveResult r;
    double open_min = std::numeric_limits<double>::infinity();
    while (!queue_.empty()) {
      open_min = std::min(open_min, queue_.top()->bound);
      queue_.pop();
    }
    const bool closed = open_min >= cutoff();
    r.best_bound = std::min({inc_cost_, pruned_min_, open_min});
    r.reconstruction.edges = inc_;
    r.reconstruction.cost = inc_cost_;
    r.reconstruction.mode = m_.mode;
    r.reconstruction.status = closed ? SolveStatus::optimal
                              : timed_out_ ? SolveStatus::timeout
                                           : SolveStatus::feasible_with_gap;
    r.reconstruction.bound = r.best_bound;
    r.nodes_explored = explored_;
    r.lp_iterations = lp_iterations_;
    r.wall_time = seconds_since(t0_);
    return r;
  }

  const MipModel& m_;
  const SolveOptions& opt_;
  Clock::time_point t0_, deadline_;
  std::vector<double> root_lo_, root_hi_;
  std::shared_ptr<const lp::Problem> problem_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::priority_queue<std::unique_ptr<Node>, std::vector<std::unique_ptr<Node>>, NodeAfter> queue_;
  long long seq_ = 0;
  long long explored_ = 0;
  long long lp_iterations_ = 0;
  std::vector<lp::SparseRow> cut_pool_;
  int active_ = 0;
  bool stop_ = false;
  bool timed_out_ = false;
  std::exception_ptr error_;

  bool have_incumbent_ = false;
  double inc_cost_ = 0.0;
  std::vector<EdgeId> inc_;
  double pruned_min_ = std::numeric_limits<double>::infinity();
};

}  // namespace detail

/// Exact solve of the model by branch and bound.
inline SolveResult solve(const MipModel& m, const SolveOptions& opt = {}) {
  if (opt.absolute_gap_tolerance < 0) fail(ErrorCode::invalid_argument, "gap tolerance must be non-negative");
  if (opt.parallel_workers < 1) fail(ErrorCode::invalid_argument, "parallel_workers must be at least 1");
  detail::BranchAndBound bb(m, opt);
  return bb.run();
}

inline SolveResult solve(const Graph& g, const SolveOptions& opt = {}, Formulation f = Formulation::compact,
                         std::optional<Mode> mode = std::nullopt) {
  const auto m = build_model(g, mode.value_or(g.mode()), f);
  return solve(m, opt);
}

/// Re-solve with a single weight replaced; the graph is not modified.
inline SolveResult resolve_with_weight_override(const Graph& g, Mode mode, EdgeId e, double w,
                                                const SolveOptions& opt = {},
                                                std::span<const double> weights = {}) {
  auto W = weights.empty() ? g.weights() : std::vector<double>(weights.begin(), weights.end());
  if (e < 0 || e >= g.n_edges()) fail(ErrorCode::invalid_argument, "unknown edge id " + std::to_string(e));
  W[static_cast<std::size_t>(e)] = w;
  return solve(build_compact(g, mode, W), opt);
}

/// Exhaustive search over all edge subsets (|E| <= 20). Among optimal subsets
/// the lexicographically smallest sorted id list wins.
inline Reconstruction brute_force(const Graph& g, Mode mode, std::span<const double> weights = {}) {
  constexpr int limit = 20;
  if (g.n_edges() > limit) {
    fail(ErrorCode::size_limit, "brute force supports at most " + std::to_string(limit) + " edges, got " +
                                    std::to_string(g.n_edges()));
  }
  const auto W = weights.empty() ? g.weights() : std::vector<double>(weights.begin(), weights.end());
  const int n = g.n_edges();
  Reconstruction best;
  best.mode = mode;
  best.cost = 0.0;
  std::vector<EdgeId> R;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    R.clear();
    for (int e = 0; e < n; ++e)
      if (mask & (1u << e)) R.push_back(e);
    const double c = cost(R, W);
    if (c > best.cost + 1e-9) continue;
    if (std::abs(c - best.cost) <= 1e-9 && !(R < best.edges)) continue;
    if (!validate(R, g, mode)) continue;
    best.edges = R;
    best.cost = c;
  }
  best.status = SolveStatus::optimal;
  best.bound = best.cost;
  return best;
}

}  // namespace delin
