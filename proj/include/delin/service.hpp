#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "delin/attention.hpp"
#include "delin/classifier.hpp"
#include "delin/error.hpp"
#include "delin/graph.hpp"
#include "delin/graph_io.hpp"
#include "delin/solver.hpp"

namespace delin {

enum class Phase { active_learning, proofreading };

inline std::string_view to_string(Phase p) { return p == Phase::active_learning ? "active_learning" : "proofreading"; }

inline Phase parse_phase(std::string_view s) {
  if (s == "active_learning") return Phase::active_learning;
  if (s == "proofreading") return Phase::proofreading;
  fail(ErrorCode::invalid_argument, "unknown phase '" + std::string(s) + "' (expected active_learning|proofreading)");
}

inline GtLabel parse_label(std::string_view s) {
  if (s == "pos" || s == "positive") return GtLabel::positive;
  if (s == "neg" || s == "negative") return GtLabel::negative;
  fail(ErrorCode::invalid_argument, "label must be 'positive' or 'negative'");
}

inline std::string_view label_token(GtLabel l) { return l == GtLabel::positive ? "positive" : "negative"; }

struct ServiceConfig {
  std::string data_dir = "delin-data";
  double solver_time_limit = 5.0;
  int workers = 1;
  int snapshot_every = 16;
};

struct LabelRecord {
  EdgeId edge = 0;
  GtLabel label = GtLabel::positive;
  std::string timestamp;
};

struct HistoryEntry {
  std::string event;  // "create" or "label"
  EdgeId edge = -1;
  GtLabel label = GtLabel::unknown;
  double cost = 0.0;
  SolveStatus status = SolveStatus::optimal;
  std::optional<double> topology;
};

struct Query {
  EdgeId edge = 0;
  VertexId u = 0, v = 0;
  std::optional<std::array<double, 3>> pos_u, pos_v;
  AttentionScore score;
};

namespace detail {

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

inline SolveStatus parse_status(std::string_view s) {
  if (s == "optimal") return SolveStatus::optimal;
  if (s == "feasible_with_gap") return SolveStatus::feasible_with_gap;
  if (s == "timeout") return SolveStatus::timeout;
  fail(ErrorCode::parse, "unknown solve status '" + std::string(s) + "'");
}

inline nlohmann::json to_json(const Reconstruction& R) {
  return {{"edges", R.edges},
          {"cost", R.cost},
          {"mode", std::string(to_string(R.mode))},
          {"status", std::string(to_string(R.status))},
          {"bound", R.bound}};
}

inline Reconstruction reconstruction_from_json(const nlohmann::json& j) {
  Reconstruction R;
  R.edges = j.at("edges").get<std::vector<EdgeId>>();
  R.cost = j.at("cost").get<double>();
  R.mode = parse_mode(j.at("mode").get<std::string>());
  R.status = parse_status(j.at("status").get<std::string>());
  R.bound = j.at("bound").get<double>();
  return R;
}

inline std::vector<EdgeId> symmetric_difference(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
  std::vector<EdgeId> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

/// One annotation session. State is a pure fold of its event log; the
/// reconstruction recorded in each event is reused on replay so that a
/// time-limited solve replays to the same result.
class Session {
 public:
  std::string id;
  Graph graph;
  Mode mode = Mode::tree;
  Phase phase = Phase::proofreading;
  nlohmann::json config = nlohmann::json::object();
  WeightMap base_weights;
  WeightMap weights;
  std::vector<LabelRecord> labels;
  Reconstruction current;
  std::vector<HistoryEntry> history;
  long long events = 0;

  bool verified(EdgeId e) const {
    return std::any_of(labels.begin(), labels.end(), [e](const LabelRecord& l) { return l.edge == e; });
  }

  std::optional<double> topology() const {
    if (!graph.has_gt()) return std::nullopt;
    return topology_score(current.edges, graph.gt_edges(), graph);
  }

  /// Weights after applying `labels` in order to the base weights.
  WeightMap weights_for(std::span<const LabelRecord> ls) const {
    WeightMap W = base_weights;
    if (uses_classifier() && phase == Phase::active_learning) {
      if (ls.empty()) return W;
      auto C = fitted_classifier(ls);
      return weights_from_classifier(*C, graph);
    }
    for (const auto& l : ls) {
      const auto s = weight_stats(W);
      W[static_cast<std::size_t>(l.edge)] = l.label == GtLabel::positive ? s.A : s.B;
    }
    return W;
  }

  bool uses_classifier() const { return config.value("weights", std::string("graph")) == "classifier"; }

  /// Classifier trained on the configured training graph plus the session labels.
  std::unique_ptr<Classifier> fitted_classifier(std::span<const LabelRecord> ls = {}) const {
    if (!config.contains("train_graph")) {
      fail(ErrorCode::invalid_argument, "config.weights = classifier needs config.train_graph");
    }
    const Graph train = graph_from_json(config.at("train_graph"));
    std::vector<EdgeId> all(static_cast<std::size_t>(train.n_edges()));
    std::iota(all.begin(), all.end(), 0);
    auto examples = examples_for(train, all);
    for (const auto& l : ls) {
      const auto& e = graph.edge(l.edge);
      if (e.features.empty()) fail(ErrorCode::invalid_argument, "edge " + std::to_string(l.edge) + " has no features");
      examples.push_back({e.features, l.label == GtLabel::positive});
    }
    auto C = std::make_unique<LogisticRegression>();
    C->fit(examples);
    return C;
  }

  nlohmann::json history_json() const {
    auto out = nlohmann::json::array();
    for (std::size_t i = 0; i < history.size(); ++i) {
      const auto& h = history[i];
      nlohmann::json j = {{"step", i}, {"event", h.event}, {"cost", h.cost}, {"status", std::string(to_string(h.status))}};
      if (h.edge >= 0) {
        j["edge_id"] = h.edge;
        j["label"] = std::string(label_token(h.label));
      }
      if (h.topology) j["topology"] = *h.topology;
      out.push_back(std::move(j));
    }
    return out;
  }

  nlohmann::json snapshot() const {
    auto ls = nlohmann::json::array();
    for (const auto& l : labels)
      ls.push_back({{"edge_id", l.edge}, {"label", std::string(label_token(l.label))}, {"timestamp", l.timestamp}});
    auto hs = nlohmann::json::array();
    for (const auto& h : history) {
      nlohmann::json j = {{"event", h.event},
                          {"edge_id", h.edge},
                          {"label", h.label == GtLabel::unknown ? "" : std::string(label_token(h.label))},
                          {"cost", h.cost},
                          {"status", std::string(to_string(h.status))}};
      if (h.topology) j["topology"] = *h.topology;
      hs.push_back(std::move(j));
    }
    return {{"id", id},
            {"graph", graph_to_json(graph)},
            {"mode", std::string(to_string(mode))},
            {"phase", std::string(to_string(phase))},
            {"config", config},
            {"base_weights", base_weights},
            {"weights", weights},
            {"labels", ls},
            {"reconstruction", detail::to_json(current)},
            {"history", hs},
            {"events", events}};
  }

  static std::unique_ptr<Session> from_snapshot(const nlohmann::json& j) {
    auto s = std::make_unique<Session>();
    s->id = j.at("id").get<std::string>();
    s->graph = graph_from_json(j.at("graph"));
    s->mode = parse_mode(j.at("mode").get<std::string>());
    s->phase = parse_phase(j.at("phase").get<std::string>());
    s->config = j.at("config");
    s->base_weights = j.at("base_weights").get<WeightMap>();
    s->weights = j.at("weights").get<WeightMap>();
    for (const auto& l : j.at("labels"))
      s->labels.push_back({l.at("edge_id").get<EdgeId>(), parse_label(l.at("label").get<std::string>()),
                           l.at("timestamp").get<std::string>()});
    s->current = detail::reconstruction_from_json(j.at("reconstruction"));
    for (const auto& h : j.at("history")) {
      HistoryEntry e;
      e.event = h.at("event").get<std::string>();
      e.edge = h.at("edge_id").get<EdgeId>();
      const auto lab = h.at("label").get<std::string>();
      e.label = lab.empty() ? GtLabel::unknown : parse_label(lab);
      e.cost = h.at("cost").get<double>();
      e.status = detail::parse_status(h.at("status").get<std::string>());
      if (h.contains("topology")) e.topology = h.at("topology").get<double>();
      s->history.push_back(e);
    }
    s->events = j.at("events").get<long long>();
    return s;
  }

  /// Applies one logged event. Creation events are handled by the store.
  void apply(const nlohmann::json& ev) {
    const auto type = ev.at("type").get<std::string>();
    const auto R = detail::reconstruction_from_json(ev.at("reconstruction"));
    if (type == "label") {
      LabelRecord l{ev.at("edge_id").get<EdgeId>(), parse_label(ev.at("label").get<std::string>()),
                    ev.at("timestamp").get<std::string>()};
      labels.push_back(l);
      weights = weights_for(labels);
      current = R;
      history.push_back({"label", l.edge, l.label, R.cost, R.status, topology()});
    } else if (type == "undo") {
      if (labels.empty()) fail(ErrorCode::conflict, "nothing to undo");
      labels.pop_back();
      history.pop_back();
      weights = weights_for(labels);
      current = R;
    } else {
      fail(ErrorCode::parse, "unknown event type '" + type + "'");
    }
    ++events;
  }

  mutable std::mutex mutex;
};

/// Session registry with on-disk persistence: data_dir/sessions/<id>/events.jsonl
/// plus a periodic snapshot.json.
class SessionService {
 public:
  explicit SessionService(ServiceConfig cfg) : cfg_(std::move(cfg)) {
    namespace fs = std::filesystem;
    root_ = fs::path(cfg_.data_dir) / "sessions";
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) fail(ErrorCode::io, "cannot create data directory '" + root_.string() + "': " + ec.message());
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root_))
      if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      auto s = load(d);
      if (!s) continue;
      next_id_ = std::max(next_id_, id_number(s->id) + 1);
      sessions_.emplace(s->id, std::move(s));
    }
  }

  const ServiceConfig& config() const { return cfg_; }

  SolveOptions solve_options() const {
    SolveOptions o;
    if (cfg_.solver_time_limit > 0) o.time_limit = cfg_.solver_time_limit;
    return o;
  }

  /// Creates and persists a session; returns its id.
  std::string create(const Graph& g, Mode mode, Phase phase, nlohmann::json config = nlohmann::json::object()) {
    if (config.is_null()) config = nlohmann::json::object();
    if (!config.is_object()) fail(ErrorCode::invalid_argument, "config must be an object");
    auto s = std::make_unique<Session>();
    s->graph = g;
    s->mode = mode;
    s->phase = phase;
    s->config = config;
    const auto source = config.value("weights", std::string("graph"));
    if (source == "graph") {
      s->base_weights = g.weights();
    } else if (source == "classifier") {
      s->base_weights = weights_from_classifier(*s->fitted_classifier(), g);
    } else {
      fail(ErrorCode::invalid_argument, "config.weights must be 'graph' or 'classifier'");
    }
    s->weights = s->base_weights;
    s->current = solve_current(*s);
    s->history.push_back({"create", -1, GtLabel::unknown, s->current.cost, s->current.status, s->topology()});
    s->events = 1;

    std::unique_lock lock(registry_);
    s->id = format_id(next_id_++);
    const nlohmann::json ev = {{"type", "create"},
                               {"id", s->id},
                               {"timestamp", detail::utc_now()},
                               {"graph", graph_to_json(g)},
                               {"mode", std::string(to_string(mode))},
                               {"phase", std::string(to_string(phase))},
                               {"config", config},
                               {"base_weights", s->base_weights},
                               {"reconstruction", detail::to_json(s->current)}};
    std::filesystem::create_directories(dir(s->id));
    append(s->id, ev);
    const auto id = s->id;
    sessions_.emplace(id, std::move(s));
    return id;
  }

  std::vector<std::string> ids() const {
    std::shared_lock lock(registry_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
  }

  /// Runs f on the session under its writer lock.
  template <class F>
  auto with(const std::string& id, F&& f) const {
    Session* s = nullptr;
    {
      std::shared_lock lock(registry_);
      const auto it = sessions_.find(id);
      if (it == sessions_.end()) fail(ErrorCode::not_found, "unknown session '" + id + "'");
      s = it->second.get();
    }
    std::lock_guard guard(s->mutex);
    return f(*s);
  }

  nlohmann::json summary(const std::string& id) const {
    return with(id, [&](const Session& s) {
      auto ls = nlohmann::json::array();
      for (const auto& l : s.labels)
        ls.push_back({{"edge_id", l.edge}, {"label", std::string(label_token(l.label))}, {"timestamp", l.timestamp}});
      nlohmann::json j = {{"id", s.id},
                          {"mode", std::string(to_string(s.mode))},
                          {"phase", std::string(to_string(s.phase))},
                          {"config", s.config},
                          {"n_vertices", s.graph.n_vertices()},
                          {"n_edges", s.graph.n_edges()},
                          {"labels", ls},
                          {"weight_overrides", overrides(s)},
                          {"history_length", s.history.size()},
                          {"cost", s.current.cost},
                          {"status", std::string(to_string(s.current.status))},
                          {"graph", graph_to_json(s.graph)}};
      return j;
    });
  }

  nlohmann::json reconstruction(const std::string& id) const {
    return with(id, [&](const Session& s) {
      auto j = detail::to_json(s.current);
      if (auto t = s.topology()) j["topology"] = *t;
      return j;
    });
  }

  nlohmann::json metrics(const std::string& id) const {
    return with(id, [&](const Session& s) {
      nlohmann::json j = {{"id", s.id},
                          {"labels", s.labels.size()},
                          {"cost", s.current.cost},
                          {"status", std::string(to_string(s.current.status))},
                          {"history", s.history_json()}};
      if (auto t = s.topology()) j["topology"] = *t;
      return j;
    });
  }

  /// Top-k unverified edges by the phase's criterion.
  std::vector<Query> next_queries(const std::string& id, int k = 4) const {
    if (k < 1) fail(ErrorCode::invalid_argument, "k must be >= 1");
    return with(id, [&](const Session& s) {
      std::vector<EdgeId> pool;
      for (EdgeId e = 0; e < s.graph.n_edges(); ++e)
        if (!s.verified(e)) pool.push_back(e);
      std::vector<Query> out;
      if (pool.empty()) return out;
      if (s.current.status != SolveStatus::optimal) {
        fail(ErrorCode::precondition, "current reconstruction is not proven optimal; raise the solver time limit");
      }
      AttentionOptions ao;
      ao.solve = solve_options();
      ao.workers = cfg_.workers;
      const auto scores = score_edges(s.graph, s.mode, s.weights, s.current, pool, ao);
      const auto key = s.phase == Phase::active_learning ? RankKey::delta_c : RankKey::s;
      for (EdgeId e : rank_edges(scores, key, k)) {
        const auto it = std::find_if(scores.begin(), scores.end(), [e](const AttentionScore& a) { return a.edge == e; });
        const auto& ed = s.graph.edge(e);
        out.push_back({e, ed.u, ed.v, s.graph.vertex(ed.u).pos, s.graph.vertex(ed.v).pos, *it});
      }
      return out;
    });
  }

  /// Records a verified label, re-solves, and returns the changed edges.
  nlohmann::json submit_label(const std::string& id, EdgeId edge, GtLabel label) {
    return with(id, [&](Session& s) {
      if (edge < 0 || edge >= s.graph.n_edges()) fail(ErrorCode::not_found, "unknown edge id " + std::to_string(edge));
      if (label != GtLabel::positive && label != GtLabel::negative) {
        fail(ErrorCode::invalid_argument, "label must be positive or negative");
      }
      if (s.verified(edge)) fail(ErrorCode::conflict, "edge " + std::to_string(edge) + " is already verified");
      const auto before = s.current.edges;
      auto ls = s.labels;
      const LabelRecord rec{edge, label, detail::utc_now()};
      ls.push_back(rec);
      const auto W = s.weights_for(ls);
      const auto R = solve_weights(s, W);
      const nlohmann::json ev = {{"type", "label"},
                                 {"edge_id", edge},
                                 {"label", std::string(label_token(label))},
                                 {"timestamp", rec.timestamp},
                                 {"weight", W[static_cast<std::size_t>(edge)]},
                                 {"reconstruction", detail::to_json(R)}};
      append(s.id, ev);
      s.apply(ev);
      maybe_snapshot(s);
      return change_report(s, before);
    });
  }

  /// Removes the last label and recomputes weights and reconstruction from scratch.
  nlohmann::json undo(const std::string& id) {
    return with(id, [&](Session& s) {
      if (s.labels.empty()) fail(ErrorCode::conflict, "nothing to undo");
      const auto before = s.current.edges;
      const std::vector<LabelRecord> ls(s.labels.begin(), s.labels.end() - 1);
      const auto R = solve_weights(s, s.weights_for(ls));
      const nlohmann::json ev = {
          {"type", "undo"}, {"timestamp", detail::utc_now()}, {"reconstruction", detail::to_json(R)}};
      append(s.id, ev);
      s.apply(ev);
      maybe_snapshot(s);
      return change_report(s, before);
    });
  }

  static nlohmann::json to_json(const Query& q) {
    nlohmann::json j = {{"edge_id", q.edge},
                        {"endpoints", {q.u, q.v}},
                        {"score",
                         {{"w", q.score.w},
                          {"w_prime", q.score.w_prime},
                          {"delta_c", q.score.delta_c},
                          {"topo", q.score.topo},
                          {"s", q.score.s},
                          {"special_case", q.score.special_case}}}};
    j["positions"] = {q.pos_u ? nlohmann::json(*q.pos_u) : nlohmann::json(nullptr),
                      q.pos_v ? nlohmann::json(*q.pos_v) : nlohmann::json(nullptr)};
    return j;
  }

 private:
  static std::string format_id(long long n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06lld", n);
    return buf;
  }

  static long long id_number(const std::string& id) {
    try {
      return id.size() > 1 ? std::stoll(id.substr(1)) : 0;
    } catch (const std::exception&) {
      return 0;
    }
  }

  std::filesystem::path dir(const std::string& id) const { return root_ / id; }

  nlohmann::json overrides(const Session& s) const {
    nlohmann::json o = nlohmann::json::object();
    for (const auto& l : s.labels) o[std::to_string(l.edge)] = s.weights[static_cast<std::size_t>(l.edge)];
    return o;
  }

  Reconstruction solve_weights(const Session& s, std::span<const double> W) const {
    return solve(build_compact(s.graph, s.mode, W), solve_options()).reconstruction;
  }

  Reconstruction solve_current(const Session& s) const { return solve_weights(s, s.weights); }

  nlohmann::json change_report(const Session& s, const std::vector<EdgeId>& before) const {
    std::vector<EdgeId> added, removed;
    std::set_difference(s.current.edges.begin(), s.current.edges.end(), before.begin(), before.end(),
                        std::back_inserter(added));
    std::set_difference(before.begin(), before.end(), s.current.edges.begin(), s.current.edges.end(),
                        std::back_inserter(removed));
    nlohmann::json j = {{"cost", s.current.cost},
                        {"status", std::string(to_string(s.current.status))},
                        {"optimal", s.current.status == SolveStatus::optimal},
                        {"changed", detail::symmetric_difference(before, s.current.edges)},
                        {"added", added},
                        {"removed", removed},
                        {"history_length", s.history.size()}};
    if (auto t = s.topology()) j["topology"] = *t;
    return j;
  }

  void append(const std::string& id, const nlohmann::json& ev) const {
    const auto path = dir(id) / "events.jsonl";
    std::ofstream out(path, std::ios::app | std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot append to '" + path.string() + "'");
    out << ev.dump() << '\n';
    out.flush();
    if (!out) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
  }

  void maybe_snapshot(const Session& s) const {
    if (cfg_.snapshot_every <= 0 || s.events % cfg_.snapshot_every != 0) return;
    const auto tmp = dir(s.id) / "snapshot.json.tmp";
    write_file(tmp.string(), s.snapshot().dump());
    std::filesystem::rename(tmp, dir(s.id) / "snapshot.json");
  }

  /// Rebuilds a session from its snapshot (if any) plus the events after it.
  std::unique_ptr<Session> load(const std::filesystem::path& d) const {
    const auto log = d / "events.jsonl";
    if (!std::filesystem::exists(log)) return nullptr;
    std::vector<nlohmann::json> events;
    {
      std::ifstream in(log, std::ios::binary);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
          events.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error&) {
          break;  // torn final write
        }
      }
    }
    if (events.empty()) return nullptr;
    std::unique_ptr<Session> s;
    const auto snap = d / "snapshot.json";
    if (std::filesystem::exists(snap)) {
      s = Session::from_snapshot(nlohmann::json::parse(read_file(snap.string())));
    } else {
      const auto& c = events.front();
      s = std::make_unique<Session>();
      s->id = c.at("id").get<std::string>();
      s->graph = graph_from_json(c.at("graph"));
      s->mode = parse_mode(c.at("mode").get<std::string>());
      s->phase = parse_phase(c.at("phase").get<std::string>());
      s->config = c.at("config");
      s->base_weights = c.at("base_weights").get<WeightMap>();
      s->weights = s->base_weights;
      s->current = detail::reconstruction_from_json(c.at("reconstruction"));
      s->history.push_back({"create", -1, GtLabel::unknown, s->current.cost, s->current.status, s->topology()});
      s->events = 1;
    }
    for (auto i = static_cast<std::size_t>(s->events); i < events.size(); ++i) s->apply(events[i]);
    return s;
  }

  ServiceConfig cfg_;
  std::filesystem::path root_;
  mutable std::shared_mutex registry_;
  std::map<std::string, std::unique_ptr<Session>> sessions_;
  long long next_id_ = 1;
};

}  // namespace delin
