#include "http_server.hpp"

#include <httplib.h>

#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"

namespace greybox::service {

namespace {

void send(httplib::Response& res, const Reply& reply) {
  res.status = reply.status;
  res.set_content(json_util::canonical_dump(reply.body), "application/json; charset=utf-8");
}

template <typename Handler>
auto with_body(Handler&& h) {
  return [h = std::forward<Handler>(h)](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = json_util::parse_document(req.body);
    } catch (const Error& e) {
      send(res, error_reply(BadRequest(e.what(), e.details())));
      return;
    }
    send(res, h(req.matches[1].str(), body));
  };
}

}  // namespace

HttpServer::HttpServer(SessionService& service, std::optional<std::filesystem::path> static_dir)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = json_util::parse_document(req.body);
    } catch (const Error& e) {
      send(res, error_reply(BadRequest(e.what(), e.details())));
      return;
    }
    send(res, service_.create(body));
  });
  s.Get(R"(/sessions/([A-Za-z0-9_-]+)/next)", [this](const httplib::Request& req, httplib::Response& res) {
    std::optional<std::string> jump;
    if (req.has_param("jump")) jump = req.get_param_value("jump");
    send(res, service_.next(req.matches[1].str(), jump));
  });
  s.Post(R"(/sessions/([A-Za-z0-9_-]+)/answers)",
         with_body([this](const std::string& id, const nlohmann::json& b) { return service_.answer(id, b); }));
  s.Post(R"(/sessions/([A-Za-z0-9_-]+)/skips)",
         with_body([this](const std::string& id, const nlohmann::json& b) { return service_.skip(id, b); }));
  s.Post(R"(/sessions/([A-Za-z0-9_-]+)/finalize)",
         with_body([this](const std::string& id, const nlohmann::json& b) { return service_.finalize(id, b); }));
  s.Get(R"(/sessions/([A-Za-z0-9_-]+)/spec)", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.spec(req.matches[1].str()));
  });
  s.Get("/templates/default",
        [this](const httplib::Request&, httplib::Response& res) { send(res, service_.default_template()); });
  if (static_dir) s.set_mount_point("/", static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

}  // namespace greybox::service
