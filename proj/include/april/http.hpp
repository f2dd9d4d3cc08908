#pragma once

#include <chrono>
#include <cstdio>
#include <string>

// Eigen must be parsed before httplib drags in <resolv.h> and its _res macro.
#include "april/service.hpp"

#include "httplib.h"

namespace april {

namespace detail {

inline void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  for (const auto& [k, v] : r.headers) res.set_header(k, v);
  res.set_content(r.body.dump(), "application/json");
}

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

}  // namespace detail

/// Routes the JSON API onto `server`. Requests are logged to stderr as one
/// JSON object per line.
inline void bind_routes(httplib::Server& server, SessionManager& manager) {
  using detail::reply;
  auto with_body = [&manager](auto handler) {
    return [&manager, handler](const httplib::Request& req, httplib::Response& res) {
      json body;
      try {
        body = detail::parse_body(req);
      } catch (const json::exception& e) {
        reply(res, error_response(ErrorCode::invalid_argument, std::string("bad JSON: ") + e.what()));
        return;
      }
      reply(res, handler(req, body));
    };
  };

  server.Get("/healthz", [&](const httplib::Request&, httplib::Response& res) { reply(res, manager.healthz()); });
  server.Get("/clusters", [&](const httplib::Request&, httplib::Response& res) { reply(res, manager.list_clusters()); });
  server.Get(R"(/clusters/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, manager.cluster_background(req.matches[1]));
  });
  server.Post("/sessions", with_body([&](const httplib::Request&, const json& b) { return manager.create(b); }));
  server.Get(R"(/sessions/([^/]+)/pair)", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, manager.get_pair(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/preference)", with_body([&](const httplib::Request& req, const json& b) {
                return manager.post_preference(req.matches[1], b);
              }));
  server.Get(R"(/sessions/([^/]+)/result)", [&](const httplib::Request& req, httplib::Response& res) {
    reply(res, manager.result(req.matches[1]));
  });
  server.Post(R"(/sessions/([^/]+)/judgement)", with_body([&](const httplib::Request& req, const json& b) {
                return manager.judgement(req.matches[1], b);
              }));

  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    const json line{{"method", req.method}, {"path", req.path}, {"status", res.status}};
    std::fprintf(stderr, "%s\n", line.dump().c_str());
  });
}

}  // namespace april
