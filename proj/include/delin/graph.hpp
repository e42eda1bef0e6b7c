#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "delin/error.hpp"

namespace delin {

using VertexId = int;
using EdgeId = int;

enum class Mode { tree, subgraph };
enum class GtLabel { unknown, positive, negative };

inline std::string_view to_string(Mode mode) {
  return mode == Mode::tree ? "tree" : "subgraph";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "tree") return Mode::tree;
  if (s == "subgraph") return Mode::subgraph;
  fail(ErrorCode::invalid_argument, "unknown mode '" + std::string(s) + "' (expected tree|subgraph)");
}

struct Vertex {
  VertexId id = 0;
  std::optional<std::array<double, 3>> pos;

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
  EdgeId id = 0;
  VertexId u = 0;
  VertexId v = 0;
  double weight = 0.0;
  std::vector<double> features;
  GtLabel gt = GtLabel::unknown;

  VertexId other(VertexId x) const { return x == u ? v : u; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Edge weights indexed by edge id.
using WeightMap = std::vector<double>;

/// Undirected overcomplete graph with a designated root. Vertex and edge ids
/// are dense (0..n-1) and equal to their position. Immutable once built.
class Graph {
 public:
  Graph() = default;

  Graph(std::vector<Vertex> vertices, std::vector<Edge> edges, VertexId root,
        Mode mode = Mode::tree, nlohmann::json provenance = nullptr)
      : vertices_(std::move(vertices)),
        edges_(std::move(edges)),
        root_(root),
        mode_(mode),
        provenance_(std::move(provenance)) {
    check_and_index();
  }

  std::span<const Vertex> vertices() const { return vertices_; }
  std::span<const Edge> edges() const { return edges_; }
  const Vertex& vertex(VertexId id) const { return vertices_.at(static_cast<std::size_t>(id)); }
  const Edge& edge(EdgeId id) const {
    if (id < 0 || id >= n_edges()) {
      fail(ErrorCode::invalid_argument, "unknown edge id " + std::to_string(id));
    }
    return edges_[static_cast<std::size_t>(id)];
  }
  VertexId root() const { return root_; }
  Mode mode() const { return mode_; }
  int n_vertices() const { return static_cast<int>(vertices_.size()); }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const nlohmann::json& provenance() const { return provenance_; }

  /// Edge ids incident to v, ascending.
  std::span<const EdgeId> incident(VertexId v) const {
    const auto b = static_cast<std::size_t>(adj_start_[static_cast<std::size_t>(v)]);
    const auto e = static_cast<std::size_t>(adj_start_[static_cast<std::size_t>(v) + 1]);
    return std::span<const EdgeId>(adj_).subspan(b, e - b);
  }

  WeightMap weights() const {
    WeightMap w(edges_.size());
    for (const auto& e : edges_) w[static_cast<std::size_t>(e.id)] = e.weight;
    return w;
  }

  bool has_features() const {
    return !edges_.empty() &&
           std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return !e.features.empty(); });
  }

  bool has_gt() const {
    return !edges_.empty() &&
           std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.gt != GtLabel::unknown; });
  }

  /// Ground-truth positive edge ids, ascending.
  std::vector<EdgeId> gt_edges() const {
    std::vector<EdgeId> out;
    for (const auto& e : edges_)
      if (e.gt == GtLabel::positive) out.push_back(e.id);
    return out;
  }

  Graph with_weights(const WeightMap& w) const {
    if (w.size() != edges_.size()) {
      fail(ErrorCode::invalid_argument, "weight map size does not match edge count");
    }
    auto edges = edges_;
    for (auto& e : edges) e.weight = w[static_cast<std::size_t>(e.id)];
    return Graph(vertices_, std::move(edges), root_, mode_, provenance_);
  }

  Graph with_mode(Mode mode) const { return Graph(vertices_, edges_, root_, mode, provenance_); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_ && a.root_ == b.root_ && a.mode_ == b.mode_ &&
           a.provenance_ == b.provenance_;
  }

 private:
  void check_and_index() {
    const int n = n_vertices();
    for (int i = 0; i < n; ++i) {
      const auto& vx = vertices_[static_cast<std::size_t>(i)];
      if (vx.id != i) {
        fail(ErrorCode::validation, "vertex ids must be dense 0..|V|-1 in order; found id " +
                                        std::to_string(vx.id) + " at position " + std::to_string(i));
      }
      if (vx.pos && !std::all_of(vx.pos->begin(), vx.pos->end(), [](double c) { return std::isfinite(c); })) {
        fail(ErrorCode::validation, "vertex " + std::to_string(i) + " has a non-finite position");
      }
    }
    if (root_ < 0 || root_ >= n) {
      fail(ErrorCode::validation, "root missing: root " + std::to_string(root_) + " is not a vertex");
    }
    std::vector<std::pair<VertexId, VertexId>> pairs;
    pairs.reserve(edges_.size());
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      const std::string where = "edge " + std::to_string(e.id);
      if (e.id != static_cast<EdgeId>(i)) {
        fail(ErrorCode::validation, "edge ids must be dense 0..|E|-1 in order; found id " +
                                        std::to_string(e.id) + " at position " + std::to_string(i));
      }
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
        fail(ErrorCode::validation, where + " references unknown vertex (" + std::to_string(e.u) + ", " +
                                        std::to_string(e.v) + ")");
      }
      if (e.u == e.v) fail(ErrorCode::validation, where + " is a self-loop");
      if (!std::isfinite(e.weight)) fail(ErrorCode::validation, where + " has a non-finite weight");
      pairs.emplace_back(std::min(e.u, e.v), std::max(e.u, e.v));
    }
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
      fail(ErrorCode::validation, "duplicate edge between the same vertex pair");
    }

    adj_start_.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const auto& e : edges_) {
      ++adj_start_[static_cast<std::size_t>(e.u) + 1];
      ++adj_start_[static_cast<std::size_t>(e.v) + 1];
    }
    std::partial_sum(adj_start_.begin(), adj_start_.end(), adj_start_.begin());
    adj_.assign(2 * edges_.size(), 0);
    auto fill = adj_start_;
    for (const auto& e : edges_) {
      adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.u)]++)] = e.id;
      adj_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.v)]++)] = e.id;
    }
  }

  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  VertexId root_ = 0;
  Mode mode_ = Mode::tree;
  nlohmann::json provenance_;
  std::vector<int> adj_start_{0};
  std::vector<EdgeId> adj_;
};

enum class SolveStatus { optimal, feasible_with_gap, timeout };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible_with_gap: return "feasible_with_gap";
    case SolveStatus::timeout: return "timeout";
  }
  return "unknown";
}

/// An edge subset chosen by a solver. `edges` is sorted and duplicate-free.
struct Reconstruction {
  std::vector<EdgeId> edges;
  double cost = 0.0;
  Mode mode = Mode::tree;
  SolveStatus status = SolveStatus::optimal;
  double bound = 0.0;  // proven lower bound on the optimum

  bool contains(EdgeId e) const { return std::binary_search(edges.begin(), edges.end(), e); }
  bool empty() const { return edges.empty(); }
};

inline std::vector<EdgeId> normalized(std::vector<EdgeId> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

/// Sum of W over R, each edge counted once, accumulated in ascending id order.
inline double cost(std::span<const EdgeId> R, std::span<const double> W) {
  std::vector<EdgeId> ids(R.begin(), R.end());
  if (!std::is_sorted(ids.begin(), ids.end()) || std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    ids = normalized(std::move(ids));
  }
  double sum = 0.0;
  for (EdgeId e : ids) {
    if (e < 0 || static_cast<std::size_t>(e) >= W.size()) {
      fail(ErrorCode::invalid_argument, "cost: unknown edge id " + std::to_string(e));
    }
    sum += W[static_cast<std::size_t>(e)];
  }
  return sum;
}

struct Validation {
  bool ok = true;
  std::string violation;

  explicit operator bool() const { return ok; }
};

namespace detail {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

}  // namespace detail

/// Vertices touched by R, ascending.
inline std::vector<VertexId> spanned_vertices(std::span<const EdgeId> R, const Graph& G) {
  std::vector<VertexId> vs;
  vs.reserve(2 * R.size());
  for (EdgeId e : R) {
    const auto& ed = G.edge(e);
    vs.push_back(ed.u);
    vs.push_back(ed.v);
  }
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  return vs;
}

/// Structural check of R against the tree / connected-subgraph requirements.
inline Validation validate(std::span<const EdgeId> R, const Graph& G, Mode mode) {
  if (R.empty()) return {};
  const auto ids = normalized(std::vector<EdgeId>(R.begin(), R.end()));
  for (EdgeId e : ids) {
    if (e < 0 || e >= G.n_edges()) {
      fail(ErrorCode::invalid_argument, "validate: unknown edge id " + std::to_string(e));
    }
  }
  detail::DisjointSets dsu(G.n_vertices());
  bool cycle = false;
  for (EdgeId e : ids) {
    const auto& ed = G.edge(e);
    if (!dsu.unite(ed.u, ed.v)) cycle = true;
  }
  const auto vs = spanned_vertices(ids, G);
  const int comp = dsu.find(vs.front());
  for (VertexId v : vs) {
    if (dsu.find(v) != comp) return {false, "disconnected"};
  }
  if (!std::binary_search(vs.begin(), vs.end(), G.root())) return {false, "root not spanned"};
  if (mode == Mode::tree && cycle) return {false, "cycle"};
  return {};
}

}  // namespace delin
