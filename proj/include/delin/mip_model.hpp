#pragma once

#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "delin/error.hpp"
#include "delin/graph.hpp"

namespace delin {

enum class Formulation { compact, legacy };

inline std::string_view to_string(Formulation f) { return f == Formulation::compact ? "compact" : "legacy"; }

inline Formulation parse_formulation(std::string_view s) {
  if (s == "compact") return Formulation::compact;
  if (s == "legacy") return Formulation::legacy;
  fail(ErrorCode::invalid_argument, "unknown formulation '" + std::string(s) + "' (expected compact|legacy)");
}

struct Arc {
  VertexId tail = 0;
  VertexId head = 0;
  EdgeId edge = 0;
};

/// Directed expansion of an undirected graph: edge e becomes arcs 2e (u->v)
/// and 2e+1 (v->u).
class ArcMap {
 public:
  ArcMap() = default;
  explicit ArcMap(const Graph& g) {
    arcs_.reserve(2 * static_cast<std::size_t>(g.n_edges()));
    in_.assign(static_cast<std::size_t>(g.n_vertices()), {});
    out_.assign(static_cast<std::size_t>(g.n_vertices()), {});
    for (const auto& e : g.edges()) {
      arcs_.push_back({e.u, e.v, e.id});
      arcs_.push_back({e.v, e.u, e.id});
    }
    for (int a = 0; a < n_arcs(); ++a) {
      out_[static_cast<std::size_t>(arcs_[static_cast<std::size_t>(a)].tail)].push_back(a);
      in_[static_cast<std::size_t>(arcs_[static_cast<std::size_t>(a)].head)].push_back(a);
    }
  }

  int n_arcs() const { return static_cast<int>(arcs_.size()); }
  const Arc& arc(int a) const { return arcs_[static_cast<std::size_t>(a)]; }
  EdgeId edge_of(int a) const { return arcs_[static_cast<std::size_t>(a)].edge; }
  int forward(EdgeId e) const { return 2 * e; }
  int backward(EdgeId e) const { return 2 * e + 1; }
  static int reverse(int a) { return a ^ 1; }
  /// Arc id for the directed pair (tail, head) along edge e.
  int arc_from(EdgeId e, VertexId tail) const {
    return arcs_[static_cast<std::size_t>(2 * e)].tail == tail ? 2 * e : 2 * e + 1;
  }
  const std::vector<int>& in(VertexId v) const { return in_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& out(VertexId v) const { return out_[static_cast<std::size_t>(v)]; }

 private:
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> out_;
};

enum class RowKind {
  indegree,      // x(in v) <= 1
  root_indegree, // x(in r) = 0
  parent,        // x_uv <= x(in u)
  flow_balance,  // net inflow covers the indegree
  capacity,      // f_uv <= cap * x_uv
  antiparallel,  // x_uv + x_vu <= 1
  conservation,  // legacy: per-commodity balance
  coupling,      // legacy: f^v_uv <= x_uv
};

struct Row {
  RowKind kind = RowKind::indegree;
  std::vector<int> idx;
  std::vector<double> coef;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  void add(int var, double c) {
    idx.push_back(var);
    coef.push_back(c);
  }
};

/// Linear model over binary arc variables x (indices 0..n_bin-1) and
/// continuous flow variables (n_bin..n_bin+n_cont-1). Minimisation.
struct MipModel {
  Formulation formulation = Formulation::compact;
  Mode mode = Mode::tree;
  int n_vertices = 0;
  int n_edges = 0;
  VertexId root = 0;
  ArcMap arcs;
  std::vector<double> edge_weights;
  int n_bin = 0;
  int n_cont = 0;
  double flow_capacity = 0.0;  // coefficient of the capacity rows
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  int n_vars() const { return n_bin + n_cont; }
  bool is_binary(int var) const { return var < n_bin; }
};

struct ModelStats {
  int n_bin = 0;
  int n_cont = 0;
  int n_rows = 0;
  long long n_nonzeros = 0;
};

inline ModelStats model_stats(const MipModel& m) {
  ModelStats s{m.n_bin, m.n_cont, static_cast<int>(m.rows.size()), 0};
  for (const auto& r : m.rows) s.n_nonzeros += static_cast<long long>(r.idx.size());
  return s;
}

namespace detail {

inline void init_common(MipModel& m, const Graph& g, Mode mode, Formulation f, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != static_cast<std::size_t>(g.n_edges())) {
    fail(ErrorCode::invalid_argument, "weight vector size does not match edge count");
  }
  m.formulation = f;
  m.mode = mode;
  m.n_vertices = g.n_vertices();
  m.n_edges = g.n_edges();
  m.root = g.root();
  m.arcs = ArcMap(g);
  m.edge_weights = weights.empty() ? g.weights() : std::vector<double>(weights.begin(), weights.end());
  m.n_bin = m.arcs.n_arcs();
}

/// Rows shared by both formulations: indegree (tree only), root, parent, antiparallel (subgraph only).
inline void emit_structure_rows(MipModel& m) {
  const auto& A = m.arcs;
  if (m.mode == Mode::tree) {
    for (VertexId v = 0; v < m.n_vertices; ++v) {
      if (v == m.root || A.in(v).empty()) continue;
      Row r;
      r.kind = RowKind::indegree;
      for (int a : A.in(v)) r.add(a, 1.0);
      r.hi = 1.0;
      m.rows.push_back(std::move(r));
    }
  }
  if (!A.in(m.root).empty()) {
    Row r;
    r.kind = RowKind::root_indegree;
    for (int a : A.in(m.root)) r.add(a, 1.0);
    r.lo = r.hi = 0.0;
    m.rows.push_back(std::move(r));
  }
  for (int a = 0; a < A.n_arcs(); ++a) {
    const VertexId u = A.arc(a).tail;
    if (u == m.root) continue;
    Row r;
    r.kind = RowKind::parent;
    r.add(a, 1.0);
    for (int b : A.in(u)) {
      if (b == a) continue;
      r.add(b, -1.0);
    }
    r.hi = 0.0;
    m.rows.push_back(std::move(r));
  }
}

inline void emit_antiparallel_rows(MipModel& m) {
  if (m.mode != Mode::subgraph) return;
  for (EdgeId e = 0; e < m.n_edges; ++e) {
    Row r;
    r.kind = RowKind::antiparallel;
    r.add(m.arcs.forward(e), 1.0);
    r.add(m.arcs.backward(e), 1.0);
    r.hi = 1.0;
    m.rows.push_back(std::move(r));
  }
}

inline void init_objective(MipModel& m) {
  const int n = m.n_vars();
  m.objective.assign(static_cast<std::size_t>(n), 0.0);
  m.lower.assign(static_cast<std::size_t>(n), 0.0);
  m.upper.assign(static_cast<std::size_t>(n), 1.0);
  for (int a = 0; a < m.n_bin; ++a) {
    m.objective[static_cast<std::size_t>(a)] = m.edge_weights[static_cast<std::size_t>(m.arcs.edge_of(a))];
  }
}

}  // namespace detail

/// Single-commodity flow model: one flow variable per arc.
inline MipModel build_compact(const Graph& g, Mode mode, std::span<const double> weights = {}) {
  MipModel m;
  detail::init_common(m, g, mode, Formulation::compact, weights);
  m.n_cont = m.n_bin;
  m.flow_capacity = mode == Mode::tree ? static_cast<double>(g.n_vertices() - 1) : static_cast<double>(g.n_edges());
  detail::init_objective(m);
  for (int a = 0; a < m.n_bin; ++a) m.upper[static_cast<std::size_t>(m.n_bin + a)] = m.flow_capacity;

  const auto& A = m.arcs;
  detail::emit_structure_rows(m);
  for (VertexId v = 0; v < m.n_vertices; ++v) {
    if (v == m.root || A.in(v).empty()) continue;
    Row r;
    r.kind = RowKind::flow_balance;
    for (int a : A.in(v)) r.add(m.n_bin + a, 1.0);
    for (int a : A.out(v)) r.add(m.n_bin + a, -1.0);
    for (int a : A.in(v)) r.add(a, -1.0);
    r.lo = 0.0;
    m.rows.push_back(std::move(r));
  }
  for (int a = 0; a < m.n_bin; ++a) {
    Row r;
    r.kind = RowKind::capacity;
    r.add(m.n_bin + a, 1.0);
    r.add(a, -m.flow_capacity);
    r.hi = 0.0;
    m.rows.push_back(std::move(r));
  }
  detail::emit_antiparallel_rows(m);
  return m;
}

/// Index of the legacy flow variable of commodity `k` (k-th non-root vertex) on arc `a`.
inline int legacy_flow_var(const MipModel& m, int k, int a) { return m.n_bin + k * m.n_bin + a; }

/// Per-vertex unit-flow model: every spanned non-root vertex receives its own
/// unit flow from the root, carried only on selected arcs.
inline MipModel build_legacy(const Graph& g, Mode mode, std::span<const double> weights = {}) {
  MipModel m;
  detail::init_common(m, g, mode, Formulation::legacy, weights);
  const int commodities = std::max(0, g.n_vertices() - 1);
  m.n_cont = commodities * m.n_bin;
  m.flow_capacity = 1.0;
  detail::init_objective(m);

  const auto& A = m.arcs;
  detail::emit_structure_rows(m);
  int k = 0;
  for (VertexId v = 0; v < m.n_vertices; ++v) {
    if (v == m.root) continue;
    for (VertexId u = 0; u < m.n_vertices; ++u) {
      if (u == m.root || (A.in(u).empty() && A.out(u).empty())) continue;
      if (u == v && m.mode == Mode::subgraph) {
        // net inflow must cover every selected incoming arc individually
        for (int b : A.in(v)) {
          Row r;
          r.kind = RowKind::conservation;
          for (int a : A.in(u)) r.add(legacy_flow_var(m, k, a), 1.0);
          for (int a : A.out(u)) r.add(legacy_flow_var(m, k, a), -1.0);
          r.add(b, -1.0);
          r.lo = 0.0;
          m.rows.push_back(std::move(r));
        }
        continue;
      }
      Row r;
      r.kind = RowKind::conservation;
      for (int a : A.in(u)) r.add(legacy_flow_var(m, k, a), 1.0);
      for (int a : A.out(u)) r.add(legacy_flow_var(m, k, a), -1.0);
      if (u == v) {
        for (int a : A.in(v)) r.add(a, -1.0);
      }
      r.lo = r.hi = 0.0;
      m.rows.push_back(std::move(r));
    }
    for (int a = 0; a < m.n_bin; ++a) {
      Row r;
      r.kind = RowKind::coupling;
      r.add(legacy_flow_var(m, k, a), 1.0);
      r.add(a, -1.0);
      r.hi = 0.0;
      m.rows.push_back(std::move(r));
    }
    ++k;
  }
  detail::emit_antiparallel_rows(m);
  return m;
}

inline MipModel build_model(const Graph& g, Mode mode, Formulation f, std::span<const double> weights = {}) {
  return f == Formulation::compact ? build_compact(g, mode, weights) : build_legacy(g, mode, weights);
}

/// Edges whose forward or backward arc is selected, ascending.
inline std::vector<EdgeId> decode(const MipModel& m, std::span<const double> values, double tol = 0.5) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < m.n_edges; ++e) {
    if (values[static_cast<std::size_t>(m.arcs.forward(e))] > tol ||
        values[static_cast<std::size_t>(m.arcs.backward(e))] > tol) {
      out.push_back(e);
    }
  }
  return out;
}

/// Full variable assignment for a valid reconstruction: edges are oriented
/// away from the root along a BFS tree (remaining edges from the earlier to
/// the later discovered endpoint) and flow is routed along tree paths.
inline std::vector<double> encode(const MipModel& m, std::span<const EdgeId> R) {
  std::vector<double> values(static_cast<std::size_t>(m.n_vars()), 0.0);
  if (R.empty()) return values;
  const auto& A = m.arcs;
  std::vector<char> in_r(static_cast<std::size_t>(m.n_edges), 0);
  for (EdgeId e : R) in_r[static_cast<std::size_t>(e)] = 1;

  std::vector<int> order(static_cast<std::size_t>(m.n_vertices), -1);
  std::vector<int> parent_arc(static_cast<std::size_t>(m.n_vertices), -1);
  std::deque<VertexId> queue{m.root};
  order[static_cast<std::size_t>(m.root)] = 0;
  int next = 1;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    for (int a : A.out(u)) {
      const auto& arc = A.arc(a);
      if (!in_r[static_cast<std::size_t>(arc.edge)] || order[static_cast<std::size_t>(arc.head)] >= 0) continue;
      order[static_cast<std::size_t>(arc.head)] = next++;
      parent_arc[static_cast<std::size_t>(arc.head)] = a;
      queue.push_back(arc.head);
    }
  }
  std::vector<int> indeg(static_cast<std::size_t>(m.n_vertices), 0);
  for (EdgeId e : R) {
    const int f = A.forward(e);
    const auto& arc = A.arc(f);
    const int ou = order[static_cast<std::size_t>(arc.tail)], ov = order[static_cast<std::size_t>(arc.head)];
    if (ou < 0 || ov < 0) fail(ErrorCode::invalid_argument, "encode: reconstruction is not connected to the root");
    const int a = ou < ov ? f : ArcMap::reverse(f);
    values[static_cast<std::size_t>(a)] = 1.0;
    ++indeg[static_cast<std::size_t>(A.arc(a).head)];
  }

  int k = 0;
  for (VertexId v = 0; v < m.n_vertices; ++v) {
    if (v == m.root) continue;
    const int demand = indeg[static_cast<std::size_t>(v)];
    if (demand > 0) {
      const double amount = m.formulation == Formulation::compact ? static_cast<double>(demand) : 1.0;
      for (VertexId w = v; w != m.root;) {
        const int a = parent_arc[static_cast<std::size_t>(w)];
        const int var = m.formulation == Formulation::compact ? m.n_bin + a : legacy_flow_var(m, k, a);
        values[static_cast<std::size_t>(var)] += amount;
        w = A.arc(a).tail;
      }
    }
    ++k;
  }
  return values;
}

struct Feasibility {
  bool ok = true;
  int row = -1;      // first violated row, or -1
  int var = -1;      // first variable outside its bounds, or -1
};

inline Feasibility check_feasible(const MipModel& m, std::span<const double> values, double tol = 1e-6) {
  for (int j = 0; j < m.n_vars(); ++j) {
    const double x = values[static_cast<std::size_t>(j)];
    if (x < m.lower[static_cast<std::size_t>(j)] - tol || x > m.upper[static_cast<std::size_t>(j)] + tol) {
      return {false, -1, j};
    }
    if (m.is_binary(j) && std::abs(x - std::round(x)) > tol) return {false, -1, j};
  }
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    const auto& r = m.rows[i];
    double act = 0.0;
    for (std::size_t t = 0; t < r.idx.size(); ++t) act += r.coef[t] * values[static_cast<std::size_t>(r.idx[t])];
    if (act < r.lo - tol || act > r.hi + tol) return {false, static_cast<int>(i), -1};
  }
  return {};
}

namespace detail {

inline std::string lp_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string lp_var_name(const MipModel& m, int var) {
  if (var < m.n_bin) return "x" + std::to_string(var);
  const int c = var - m.n_bin;
  if (m.formulation == Formulation::compact) return "f" + std::to_string(c);
  return "f" + std::to_string(c / m.n_bin) + "_" + std::to_string(c % m.n_bin);
}

inline void lp_terms(std::ostream& os, const MipModel& m, const std::vector<int>& idx, const std::vector<double>& coef) {
  if (idx.empty()) {
    os << " 0 x0";
    return;
  }
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double c = coef[t];
    os << (c < 0 ? " - " : " + ") << lp_number(std::abs(c)) << ' ' << lp_var_name(m, idx[t]);
  }
}

}  // namespace detail

/// Writes the model in CPLEX LP text format with 17 significant digits.
inline void write_lp(const MipModel& m, std::ostream& os) {
  os << "\\ " << to_string(m.formulation) << ' ' << to_string(m.mode) << " model: |V|=" << m.n_vertices
     << " |E|=" << m.n_edges << " root=" << m.root << "\n";
  os << "Minimize\n obj:";
  std::vector<int> idx;
  std::vector<double> coef;
  for (int j = 0; j < m.n_vars(); ++j) {
    if (m.objective[static_cast<std::size_t>(j)] != 0.0) {
      idx.push_back(j);
      coef.push_back(m.objective[static_cast<std::size_t>(j)]);
    }
  }
  detail::lp_terms(os, m, idx, coef);
  os << "\nSubject To\n";
  int r_id = 0;
  for (const auto& r : m.rows) {
    auto emit = [&](const char* sense, double rhs) {
      os << " c" << r_id++ << ':';
      detail::lp_terms(os, m, r.idx, r.coef);
      os << ' ' << sense << ' ' << detail::lp_number(rhs) << '\n';
    };
    if (r.lo == r.hi) {
      emit("=", r.lo);
    } else {
      if (std::isfinite(r.lo)) emit(">=", r.lo);
      if (std::isfinite(r.hi)) emit("<=", r.hi);
    }
  }
  os << "Bounds\n";
  for (int j = m.n_bin; j < m.n_vars(); ++j) {
    os << ' ' << detail::lp_number(m.lower[static_cast<std::size_t>(j)]) << " <= " << detail::lp_var_name(m, j)
       << " <= " << detail::lp_number(m.upper[static_cast<std::size_t>(j)]) << '\n';
  }
  os << "Binaries\n";
  for (int j = 0; j < m.n_bin; ++j) os << ' ' << detail::lp_var_name(m, j) << '\n';
  os << "End\n";
}

}  // namespace delin
