#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "delin/error.hpp"
#include "delin/graph.hpp"
#include "delin/random.hpp"

namespace delin {

/// Sizes of the random-graph benchmark ladders (edge counts).
inline constexpr std::array<int, 9> kCompareLadder = {99, 132, 220, 330, 440, 660, 924, 1320, 1540};
inline constexpr std::array<int, 6> kExtendedLadder = {1760, 2420, 3520, 4400, 5720, 9900};

/// Vertex count used for a ladder size: |E| / 2.2 rounded (mean degree 4.4).
inline int ladder_vertices(int n_edges) { return std::max(2, (n_edges * 5 + 5) / 11); }

/// Two-class model for planted instances. Weights of a class are Gaussian
/// draws restricted to the sign of that class; flipped edges instead get the
/// opposite-sign tail of their own class and features of the other class.
struct GenSpec {
  int n_vertices = 30;
  int n_edges = 60;
  std::uint64_t seed = 1;
  Mode mode = Mode::tree;
  int feature_dim = 2;
  std::vector<double> pos_mean = {1.0, 1.0};
  std::vector<double> neg_mean = {-1.0, -1.0};
  double noise_sigma = 1.0;
  double flip_fraction = 0.0;
  int gt_vertices = 0;  // ground-truth vertex count including the root; 0 = all
  int chords = -1;      // extra ground-truth edges in subgraph mode; -1 = gt_vertices / 5
  double weight_pos_mean = -2.0;
  double weight_neg_mean = 2.0;
  double weight_sigma = 1.0;

  int effective_gt_vertices() const { return gt_vertices <= 0 ? n_vertices : gt_vertices; }
  int effective_chords() const {
    if (mode == Mode::tree) return 0;
    return chords >= 0 ? chords : effective_gt_vertices() / 5;
  }
};

inline nlohmann::json to_json(const GenSpec& s) {
  return {{"n_vertices", s.n_vertices},
          {"n_edges", s.n_edges},
          {"seed", s.seed},
          {"mode", std::string(to_string(s.mode))},
          {"feature_dim", s.feature_dim},
          {"pos_mean", s.pos_mean},
          {"neg_mean", s.neg_mean},
          {"noise_sigma", s.noise_sigma},
          {"flip_fraction", s.flip_fraction},
          {"gt_vertices", s.gt_vertices},
          {"chords", s.chords},
          {"weight_pos_mean", s.weight_pos_mean},
          {"weight_neg_mean", s.weight_neg_mean},
          {"weight_sigma", s.weight_sigma}};
}

inline GenSpec gen_spec_from_json(const nlohmann::json& j) {
  GenSpec s;
  for (const auto& [key, val] : j.items()) {
    try {
      if (key == "n_vertices") s.n_vertices = val.get<int>();
      else if (key == "n_edges") s.n_edges = val.get<int>();
      else if (key == "seed") s.seed = val.get<std::uint64_t>();
      else if (key == "mode") s.mode = parse_mode(val.get<std::string>());
      else if (key == "feature_dim") s.feature_dim = val.get<int>();
      else if (key == "pos_mean") s.pos_mean = val.get<std::vector<double>>();
      else if (key == "neg_mean") s.neg_mean = val.get<std::vector<double>>();
      else if (key == "noise_sigma") s.noise_sigma = val.get<double>();
      else if (key == "flip_fraction") s.flip_fraction = val.get<double>();
      else if (key == "gt_vertices") s.gt_vertices = val.get<int>();
      else if (key == "chords") s.chords = val.get<int>();
      else if (key == "weight_pos_mean") s.weight_pos_mean = val.get<double>();
      else if (key == "weight_neg_mean") s.weight_neg_mean = val.get<double>();
      else if (key == "weight_sigma") s.weight_sigma = val.get<double>();
      else fail(ErrorCode::parse, "gen spec: unknown field '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      fail(ErrorCode::parse, "gen spec: field '" + key + "' has the wrong type");
    }
  }
  return s;
}

struct WeightLaw {
  double pos_mean = -2.0;
  double neg_mean = 2.0;
  double sigma = 1.0;
  double pos_fraction = 0.5;  // mixture weight of the negative-mean component
};

struct SteinerInstance {
  Graph graph;
  std::vector<VertexId> terminals;
};

namespace detail {

/// Decodes a Prüfer sequence over labels 0..n-1 into n-1 edges.
inline std::vector<std::pair<int, int>> pruefer_decode(const std::vector<int>& seq, int n) {
  std::vector<std::pair<int, int>> edges;
  if (n < 2) return edges;
  if (n == 2) return {{0, 1}};
  std::vector<int> degree(static_cast<std::size_t>(n), 1);
  for (int x : seq) ++degree[static_cast<std::size_t>(x)];
  std::priority_queue<int, std::vector<int>, std::greater<>> leaves;
  for (int i = 0; i < n; ++i)
    if (degree[static_cast<std::size_t>(i)] == 1) leaves.push(i);
  for (int x : seq) {
    const int leaf = leaves.top();
    leaves.pop();
    edges.emplace_back(leaf, x);
    if (--degree[static_cast<std::size_t>(x)] == 1) leaves.push(x);
  }
  const int a = leaves.top();
  leaves.pop();
  const int b = leaves.top();
  edges.emplace_back(a, b);
  return edges;
}

/// Uniformly random labelled tree on n vertices.
inline std::vector<std::pair<int, int>> random_tree(int n, Rng& rng) {
  std::vector<int> seq;
  for (int i = 0; i + 2 < n; ++i) seq.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
  return pruefer_decode(seq, n);
}

inline std::uint64_t pair_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

/// Adds uniformly random absent pairs among `pool` until `target` pairs exist.
inline void add_random_pairs(std::vector<std::pair<int, int>>& pairs, std::set<std::uint64_t>& used,
                             const std::vector<int>& pool, std::size_t target, Rng& rng) {
  const auto k = static_cast<std::uint64_t>(pool.size());
  const std::uint64_t capacity_total = k * (k - 1) / 2;
  while (pairs.size() < target) {
    std::size_t in_pool = 0;
    for (const auto key : used) {
      const int a = static_cast<int>(key >> 32), b = static_cast<int>(key & 0xffffffffU);
      if (std::binary_search(pool.begin(), pool.end(), a) && std::binary_search(pool.begin(), pool.end(), b))
        ++in_pool;
    }
    const std::uint64_t free_pairs = capacity_total - in_pool;
    const std::uint64_t needed = target - pairs.size();
    if (needed > free_pairs) fail(ErrorCode::generation, "cannot place more edges without duplicates");
    if (free_pairs * 4 < capacity_total || needed * 2 > free_pairs) {
      // dense regime: enumerate the complement and sample from it
      std::vector<std::pair<int, int>> free;
      for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = i + 1; j < pool.size(); ++j)
          if (!used.count(pair_key(pool[i], pool[j]))) free.emplace_back(pool[i], pool[j]);
      rng.shuffle(free);
      for (const auto& p : free) {
        if (pairs.size() >= target) break;
        used.insert(pair_key(p.first, p.second));
        pairs.push_back(p);
      }
      if (pairs.size() < target) fail(ErrorCode::generation, "cannot place more edges without duplicates");
      return;
    }
    while (pairs.size() < target) {
      const int a = pool[static_cast<std::size_t>(rng.below(k))];
      const int b = pool[static_cast<std::size_t>(rng.below(k))];
      if (a == b) continue;
      if (!used.insert(pair_key(a, b)).second) continue;
      pairs.emplace_back(a, b);
    }
  }
}

inline std::vector<Vertex> random_vertices(int n, Rng& rng) {
  std::vector<Vertex> vs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    vs[static_cast<std::size_t>(i)].id = i;
    std::array<double, 3> p{};
    for (auto& c : p) c = 100.0 * rng.uniform();
    vs[static_cast<std::size_t>(i)].pos = p;
  }
  return vs;
}

/// Gaussian draw restricted to one sign (rejection sampling).
inline double signed_draw(Rng& rng, double mean, double sigma, bool negative) {
  for (int tries = 0; tries < 1000000; ++tries) {
    const double w = rng.normal(mean, sigma);
    if (negative ? w < 0.0 : w > 0.0) return w;
  }
  fail(ErrorCode::generation, "weight law cannot produce the requested sign");
}

}  // namespace detail

inline void check(const GenSpec& s) {
  auto bad = [](const std::string& why) { fail(ErrorCode::generation, "invalid gen spec: " + why); };
  if (s.n_vertices < 1) bad("n_vertices must be >= 1");
  const auto n = static_cast<long long>(s.n_vertices);
  if (s.n_edges < 0 || s.n_edges > n * (n - 1) / 2) bad("n_edges exceeds the simple-graph limit");
  if (s.n_edges < s.n_vertices - 1) bad("n_edges must be >= n_vertices - 1 for a connected instance");
  const int k = s.effective_gt_vertices();
  if (k < 1 || k > s.n_vertices) bad("gt_vertices out of range");
  const long long max_chords = static_cast<long long>(k) * (k - 1) / 2 - (k - 1);
  if (s.effective_chords() < 0 || s.effective_chords() > max_chords) bad("too many chords for the ground truth");
  if (s.n_edges < s.n_vertices - 1 + s.effective_chords()) bad("n_edges too small for tree plus chords");
  if (s.feature_dim < 0) bad("feature_dim must be >= 0");
  if (s.feature_dim > 0 &&
      (s.pos_mean.size() != static_cast<std::size_t>(s.feature_dim) ||
       s.neg_mean.size() != static_cast<std::size_t>(s.feature_dim))) {
    bad("class means must have feature_dim entries");
  }
  if (s.feature_dim > 0 && s.pos_mean == s.neg_mean) bad("class means must differ");
  if (!(s.noise_sigma > 0.0)) bad("noise_sigma must be > 0");
  if (!(s.flip_fraction >= 0.0 && s.flip_fraction < 1.0)) bad("flip_fraction must lie in [0, 1)");
  if (!(s.weight_sigma > 0.0)) bad("weight_sigma must be > 0");
}

/// Connected graph with a planted ground-truth tree (plus chords in subgraph
/// mode) through the root, distractor edges, and class-conditional features.
inline Graph planted_instance(const GenSpec& spec) {
  check(spec);
  Rng rng(spec.seed);
  const int n = spec.n_vertices;
  const int k = spec.effective_gt_vertices();
  const VertexId root = 0;
  auto vertices = detail::random_vertices(n, rng);

  std::vector<int> others;
  for (int i = 1; i < n; ++i) others.push_back(i);
  rng.shuffle(others);
  std::vector<int> gt_set = {root};
  gt_set.insert(gt_set.end(), others.begin(), others.begin() + (k - 1));
  std::vector<int> rest(others.begin() + (k - 1), others.end());

  std::set<std::uint64_t> used;
  std::vector<std::pair<int, int>> gt_pairs;
  for (auto [a, b] : detail::random_tree(k, rng)) {
    const int u = gt_set[static_cast<std::size_t>(a)], v = gt_set[static_cast<std::size_t>(b)];
    used.insert(detail::pair_key(u, v));
    gt_pairs.emplace_back(u, v);
  }
  if (spec.effective_chords() > 0) {
    auto pool = gt_set;
    std::sort(pool.begin(), pool.end());
    detail::add_random_pairs(gt_pairs, used, pool, gt_pairs.size() + static_cast<std::size_t>(spec.effective_chords()),
                             rng);
  }

  std::vector<std::pair<int, int>> distractors;
  std::vector<int> attached = gt_set;
  for (int v : rest) {
    const int u = attached[static_cast<std::size_t>(rng.below(attached.size()))];
    used.insert(detail::pair_key(u, v));
    distractors.emplace_back(u, v);
    attached.push_back(v);
  }
  {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    detail::add_random_pairs(distractors, used, pool,
                             static_cast<std::size_t>(spec.n_edges) - gt_pairs.size(), rng);
  }

  struct Proto {
    int u, v;
    bool positive;
  };
  std::vector<Proto> protos;
  for (auto [u, v] : gt_pairs) protos.push_back({u, v, true});
  for (auto [u, v] : distractors) protos.push_back({u, v, false});
  rng.shuffle(protos);

  const auto n_flip = static_cast<std::size_t>(std::llround(spec.flip_fraction * spec.n_edges));
  std::vector<char> flipped(protos.size(), 0);
  {
    std::vector<std::size_t> idx(protos.size());
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    for (std::size_t i = 0; i < n_flip && i < idx.size(); ++i) flipped[idx[i]] = 1;
  }

  std::vector<Edge> edges;
  edges.reserve(protos.size());
  for (std::size_t i = 0; i < protos.size(); ++i) {
    const auto& p = protos[i];
    Edge e;
    e.id = static_cast<EdgeId>(i);
    e.u = p.u;
    e.v = p.v;
    e.gt = p.positive ? GtLabel::positive : GtLabel::negative;
    const bool looks_positive = p.positive != static_cast<bool>(flipped[i]);
    const double mean = p.positive ? spec.weight_pos_mean : spec.weight_neg_mean;
    e.weight = detail::signed_draw(rng, mean, spec.weight_sigma, looks_positive);
    const auto& centre = looks_positive ? spec.pos_mean : spec.neg_mean;
    e.features.resize(static_cast<std::size_t>(spec.feature_dim));
    for (int d = 0; d < spec.feature_dim; ++d)
      e.features[static_cast<std::size_t>(d)] = rng.normal(centre[static_cast<std::size_t>(d)], spec.noise_sigma);
    edges.push_back(std::move(e));
  }

  nlohmann::json provenance = {
      {"generator", "planted"}, {"rng", std::string(Rng::algorithm)}, {"seed", spec.seed}, {"spec", to_json(spec)}};
  return Graph(std::move(vertices), std::move(edges), root, spec.mode, std::move(provenance));
}

/// Connected random graph: uniform random spanning tree (Prüfer) plus uniform
/// extra edges, i.i.d. weights from a two-Gaussian mixture. Root is vertex 0.
inline Graph random_weight_graph(int n_vertices, int n_edges, std::uint64_t seed, const WeightLaw& law = {}) {
  const auto n = static_cast<long long>(n_vertices);
  if (n_vertices < 1) fail(ErrorCode::generation, "n_vertices must be >= 1");
  if (n_edges < n_vertices - 1 || n_edges > n * (n - 1) / 2) {
    fail(ErrorCode::generation, "cannot realise a connected simple graph with " + std::to_string(n_vertices) +
                                    " vertices and " + std::to_string(n_edges) + " edges");
  }
  if (!(law.sigma > 0.0) || law.pos_fraction < 0.0 || law.pos_fraction > 1.0) {
    fail(ErrorCode::generation, "invalid weight law");
  }
  Rng rng(seed);
  auto vertices = detail::random_vertices(n_vertices, rng);
  std::set<std::uint64_t> used;
  std::vector<std::pair<int, int>> pairs;
  for (auto [a, b] : detail::random_tree(n_vertices, rng)) {
    used.insert(detail::pair_key(a, b));
    pairs.emplace_back(a, b);
  }
  std::vector<int> pool(static_cast<std::size_t>(n_vertices));
  std::iota(pool.begin(), pool.end(), 0);
  detail::add_random_pairs(pairs, used, pool, static_cast<std::size_t>(n_edges), rng);
  rng.shuffle(pairs);

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    Edge e;
    e.id = static_cast<EdgeId>(i);
    e.u = pairs[i].first;
    e.v = pairs[i].second;
    const bool pos = rng.uniform() < law.pos_fraction;
    e.weight = rng.normal(pos ? law.pos_mean : law.neg_mean, law.sigma);
    edges.push_back(std::move(e));
  }
  nlohmann::json provenance = {{"generator", "random"},
                               {"rng", std::string(Rng::algorithm)},
                               {"seed", seed},
                               {"spec",
                                {{"n_vertices", n_vertices},
                                 {"n_edges", n_edges},
                                 {"weight_law",
                                  {{"pos_mean", law.pos_mean},
                                   {"neg_mean", law.neg_mean},
                                   {"sigma", law.sigma},
                                   {"pos_fraction", law.pos_fraction}}}}}};
  return Graph(std::move(vertices), std::move(edges), 0, Mode::tree, std::move(provenance));
}

/// Random Steiner instance with nonnegative integer-valued weights in [1, max_weight].
inline SteinerInstance random_steiner_instance(int n_vertices, int n_edges, int n_terminals, std::uint64_t seed,
                                               int max_weight = 9) {
  if (n_terminals < 1 || n_terminals > n_vertices) fail(ErrorCode::generation, "invalid terminal count");
  auto base = random_weight_graph(n_vertices, n_edges, seed);
  Rng rng(Rng::derive(seed, 17));
  std::vector<Edge> edges(base.edges().begin(), base.edges().end());
  for (auto& e : edges) e.weight = static_cast<double>(rng.uniform_int(1, max_weight));
  std::vector<int> vs(static_cast<std::size_t>(n_vertices));
  std::iota(vs.begin(), vs.end(), 0);
  rng.shuffle(vs);
  std::vector<VertexId> terminals(vs.begin(), vs.begin() + n_terminals);
  std::sort(terminals.begin(), terminals.end());
  nlohmann::json provenance = {{"generator", "steiner"},
                               {"rng", std::string(Rng::algorithm)},
                               {"seed", seed},
                               {"terminals", terminals}};
  Graph g(std::vector<Vertex>(base.vertices().begin(), base.vertices().end()), std::move(edges), 0, Mode::tree,
          std::move(provenance));
  return {std::move(g), std::move(terminals)};
}

/// Big-M used by the Steiner reduction: 1 + sum of |w|.
inline double steiner_big_m(const Graph& g) {
  double m = 1.0;
  for (const auto& e : g.edges()) m += std::abs(e.weight);
  return m;
}

/// Turns a Steiner instance into a MinTree instance: every terminal t gets a
/// pendant vertex t' joined by an edge of weight -M; the root is the first t'.
inline Graph steiner_reduce(const SteinerInstance& inst) {
  const auto& g = inst.graph;
  if (inst.terminals.empty()) fail(ErrorCode::invalid_argument, "steiner instance needs at least one terminal");
  for (const auto& e : g.edges())
    if (e.weight < 0.0) fail(ErrorCode::invalid_argument, "steiner instance has a negative weight");
  auto ts = inst.terminals;
  std::sort(ts.begin(), ts.end());
  if (std::adjacent_find(ts.begin(), ts.end()) != ts.end())
    fail(ErrorCode::invalid_argument, "duplicate terminal");
  for (VertexId t : ts)
    if (t < 0 || t >= g.n_vertices()) fail(ErrorCode::invalid_argument, "terminal is not a vertex");

  const double big_m = steiner_big_m(g);
  std::vector<Vertex> vertices(g.vertices().begin(), g.vertices().end());
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  VertexId root = -1;
  for (VertexId t : inst.terminals) {
    Vertex nv;
    nv.id = static_cast<VertexId>(vertices.size());
    nv.pos = g.vertex(t).pos;
    vertices.push_back(nv);
    Edge e;
    e.id = static_cast<EdgeId>(edges.size());
    e.u = t;
    e.v = nv.id;
    e.weight = -big_m;
    edges.push_back(e);
    if (root < 0) root = nv.id;
  }
  nlohmann::json provenance = {{"generator", "steiner_reduction"}, {"big_m", big_m}, {"terminals", inst.terminals}};
  if (!g.provenance().is_null()) provenance["source"] = g.provenance();
  return Graph(std::move(vertices), std::move(edges), root, Mode::tree, std::move(provenance));
}

}  // namespace delin
