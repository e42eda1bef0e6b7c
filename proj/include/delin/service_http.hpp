#pragma once

#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "delin/error.hpp"
#include "delin/graph_io.hpp"
#include "delin/service.hpp"

namespace delin {

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict:
    case ErrorCode::precondition: return 409;
    case ErrorCode::invalid_argument:
    case ErrorCode::parse:
    case ErrorCode::validation:
    case ErrorCode::size_limit:
    case ErrorCode::warm_start_rejected: return 400;
    default: return 500;
  }
}

inline nlohmann::json error_body(std::string_view code, const std::string& message) {
  return {{"error", {{"code", std::string(code)}, {"message", message}}}};
}

namespace detail {

inline void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

/// Wraps a handler so library errors become {"error": {"code", "message"}} bodies.
template <class F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply(res, http_status(e.code()), error_body(to_string(e.code()), e.what()));
    } catch (const nlohmann::json::exception& e) {
      reply(res, 400, error_body("parse_error", e.what()));
    } catch (const std::exception& e) {
      reply(res, 500, error_body("internal", e.what()));
    }
  };
}

inline nlohmann::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, std::string("malformed request body: ") + e.what());
  }
}

}  // namespace detail

/// Registers the session endpoints on `server`.
inline void register_routes(httplib::Server& server, SessionService& svc) {
  using detail::guarded;
  using detail::reply;
  using nlohmann::json;

  server.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = detail::parse_body(req);
    Graph g;
    if (body.contains("graph")) {
      g = graph_from_json(body.at("graph"));
    } else if (body.contains("graph_path")) {
      g = load_graph(body.at("graph_path").get<std::string>());
    } else {
      fail(ErrorCode::invalid_argument, "request needs 'graph' or 'graph_path'");
    }
    const Mode mode = body.contains("mode") ? parse_mode(body.at("mode").get<std::string>()) : g.mode();
    const Phase phase =
        body.contains("phase") ? parse_phase(body.at("phase").get<std::string>()) : Phase::proofreading;
    const auto config = body.value("config", json::object());
    const auto id = svc.create(g, mode, phase, config);
    reply(res, 201, {{"id", id}});
  }));

  server.Get("/sessions", guarded([&svc](const httplib::Request&, httplib::Response& res) {
    json list = json::array();
    for (const auto& id : svc.ids()) {
      const auto s = svc.summary(id);
      list.push_back({{"id", id},
                      {"mode", s.at("mode")},
                      {"phase", s.at("phase")},
                      {"labels", s.at("labels").size()},
                      {"cost", s.at("cost")}});
    }
    reply(res, 200, list);
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, svc.summary(req.matches[1]));
  }));

  server.Get(R"(/sessions/([^/]+)/reconstruction)",
             guarded([&svc](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, svc.reconstruction(req.matches[1]));
             }));

  server.Get(R"(/sessions/([^/]+)/queries)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    int k = 4;
    if (req.has_param("k")) {
      try {
        k = std::stoi(req.get_param_value("k"));
      } catch (const std::exception&) {
        fail(ErrorCode::invalid_argument, "k must be an integer");
      }
    }
    json items = json::array();
    for (const auto& q : svc.next_queries(req.matches[1], k)) items.push_back(SessionService::to_json(q));
    reply(res, 200, {{"queries", items}});
  }));

  server.Post(R"(/sessions/([^/]+)/labels)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = detail::parse_body(req);
    if (!body.contains("edge_id") || !body.contains("label")) {
      fail(ErrorCode::invalid_argument, "request needs 'edge_id' and 'label'");
    }
    reply(res, 200,
          svc.submit_label(req.matches[1], body.at("edge_id").get<EdgeId>(),
                           parse_label(body.at("label").get<std::string>())));
  }));

  server.Post(R"(/sessions/([^/]+)/undo)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, svc.undo(req.matches[1]));
  }));

  server.Get(R"(/sessions/([^/]+)/metrics)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, 200, svc.metrics(req.matches[1]));
  }));

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) detail::reply(res, res.status, error_body("not_found", "no such endpoint"));
  });
}

}  // namespace delin
