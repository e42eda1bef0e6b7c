#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "delin/error.hpp"
#include "delin/graph.hpp"

namespace delin {

namespace detail {

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known,
                           const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(ErrorCode::parse, where + ": unknown field '" + key + "'");
    }
  }
}

template <class T>
T field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(ErrorCode::parse, where + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::parse, where + "." + key + ": wrong type");
  }
}

inline std::string gt_token(GtLabel g) {
  return g == GtLabel::positive ? "pos" : "neg";
}

}  // namespace detail

inline nlohmann::json graph_to_json(const Graph& G) {
  using nlohmann::json;
  json vertices = json::array();
  for (const auto& v : G.vertices()) {
    json jv = {{"id", v.id}};
    if (v.pos) jv["pos"] = *v.pos;
    vertices.push_back(std::move(jv));
  }
  json edges = json::array();
  for (const auto& e : G.edges()) {
    json je = {{"id", e.id}, {"u", e.u}, {"v", e.v}, {"weight", e.weight}};
    if (!e.features.empty()) je["features"] = e.features;
    if (e.gt != GtLabel::unknown) je["gt"] = detail::gt_token(e.gt);
    edges.push_back(std::move(je));
  }
  json out = {{"vertices", std::move(vertices)},
              {"edges", std::move(edges)},
              {"root", G.root()},
              {"mode", std::string(to_string(G.mode()))}};
  if (!G.provenance().is_null()) out["provenance"] = G.provenance();
  return out;
}

/// Builds a graph from the structured-text object; errors name the offending field.
inline Graph graph_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) fail(ErrorCode::parse, "graph: top level must be an object");
  detail::reject_unknown(doc, {"vertices", "edges", "root", "mode", "provenance"}, "graph");
  if (!doc.contains("root")) fail(ErrorCode::validation, "root missing");

  std::vector<Vertex> vertices;
  const auto& jvs = doc.contains("vertices") ? doc.at("vertices") : nlohmann::json::array();
  if (!jvs.is_array()) fail(ErrorCode::parse, "vertices: expected an array");
  for (std::size_t i = 0; i < jvs.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    const auto& jv = jvs[i];
    if (!jv.is_object()) fail(ErrorCode::parse, where + ": expected an object");
    detail::reject_unknown(jv, {"id", "pos"}, where);
    Vertex v;
    v.id = detail::field<int>(jv, "id", where);
    if (jv.contains("pos")) {
      const auto p = detail::field<std::vector<double>>(jv, "pos", where);
      if (p.size() != 3) fail(ErrorCode::parse, where + ".pos: expected 3 coordinates");
      v.pos = std::array<double, 3>{p[0], p[1], p[2]};
    }
    vertices.push_back(v);
  }
  std::sort(vertices.begin(), vertices.end(), [](const Vertex& a, const Vertex& b) { return a.id < b.id; });

  std::vector<Edge> edges;
  const auto& jes = doc.contains("edges") ? doc.at("edges") : nlohmann::json::array();
  if (!jes.is_array()) fail(ErrorCode::parse, "edges: expected an array");
  for (std::size_t i = 0; i < jes.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const auto& je = jes[i];
    if (!je.is_object()) fail(ErrorCode::parse, where + ": expected an object");
    detail::reject_unknown(je, {"id", "u", "v", "weight", "features", "gt"}, where);
    Edge e;
    e.id = detail::field<int>(je, "id", where);
    e.u = detail::field<int>(je, "u", where);
    e.v = detail::field<int>(je, "v", where);
    e.weight = detail::field<double>(je, "weight", where);
    if (je.contains("features")) e.features = detail::field<std::vector<double>>(je, "features", where);
    if (je.contains("gt")) {
      const auto g = detail::field<std::string>(je, "gt", where);
      if (g == "pos") {
        e.gt = GtLabel::positive;
      } else if (g == "neg") {
        e.gt = GtLabel::negative;
      } else {
        fail(ErrorCode::parse, where + ".gt: expected \"pos\" or \"neg\"");
      }
    }
    edges.push_back(std::move(e));
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });

  const auto root = detail::field<int>(doc, "root", "graph");
  const Mode mode = doc.contains("mode") ? parse_mode(detail::field<std::string>(doc, "mode", "graph")) : Mode::tree;
  nlohmann::json provenance = doc.contains("provenance") ? doc.at("provenance") : nlohmann::json(nullptr);
  return Graph(std::move(vertices), std::move(edges), root, mode, std::move(provenance));
}

inline Graph parse_graph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, "malformed graph file at " + detail::line_col(text, e.byte == 0 ? 0 : e.byte - 1) +
                               ": " + e.what());
  }
  return graph_from_json(doc);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::io, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorCode::io, "write failed for '" + path + "'");
}

inline Graph load_graph(const std::string& path) {
  try {
    return parse_graph(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

inline std::string dump_graph(const Graph& G) { return graph_to_json(G).dump(1) + "\n"; }

inline void save_graph(const Graph& G, const std::string& path) { write_file(path, dump_graph(G)); }

}  // namespace delin
