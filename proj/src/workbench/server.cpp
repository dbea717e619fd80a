// SPDX-License-Identifier: Apache-2.0

#include "qoe/workbench/server.hpp"

#include <charconv>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "qoe/error.hpp"
#include "qoe/workbench/session.hpp"

namespace qoe::workbench {
namespace {

void send(httplib::Response& res, const Reply& reply) {
  res.status = reply.status;
  res.set_content(reply.body.dump(), "application/json");
}

}  // namespace

void register_routes(httplib::Server& server, SessionService& service) {
  server.Get("/api/session", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.open_session(req.has_param("subject") ? req.get_param_value("subject") : std::string{}));
  });

  server.Get(R"(/api/video/([^/]+)/schedule)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.schedule(req.matches[1].str()));
  });

  server.Get(R"(/api/video/([^/]+)/frame/(\d+))", [&](const httplib::Request& req, httplib::Response& res) {
    const std::string digits = req.matches[2].str();
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
      send(res, Reply{400, {{"error", "bad frame index"}}});
      return;
    }
    std::optional<std::string> session;
    if (req.has_param("session")) session = req.get_param_value("session");
    FrameReply reply = service.frame(req.matches[1].str(), k, session);
    res.status = reply.status;
    res.set_content(std::move(reply.bytes), reply.content_type.c_str());
  });

  server.Post("/api/rating", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.rate(req.body));
  });
}

void serve(SessionService& service, const std::string& host, int port) {
  httplib::Server server;
  register_routes(server, service);
  spdlog::info("serving on http://{}:{}", host, port);
  if (!server.listen(host.c_str(), port)) fail(ErrorKind::io_error, fmt::format("cannot listen on {}:{}", host, port));
}

}  // namespace qoe::workbench
