#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "session_service.hpp"

namespace httplib {
class Server;
}

namespace greybox::service {

/// The session API over HTTP:
///   POST /sessions                      create (201)
///   GET  /sessions/{id}/next[?jump=ID]  next instance, progress, draft
///   POST /sessions/{id}/answers         {"revision", "instance", "value"}
///   POST /sessions/{id}/skips           {"revision", "instance", "reason"}
///   POST /sessions/{id}/finalize        {"revision"}
///   GET  /sessions/{id}/spec            finalized spec
///   GET  /templates/default
/// Bodies are canonical JSON. 404 unknown session, 409 stale revision,
/// 422 engine errors, 400 malformed requests.
class HttpServer {
 public:
  HttpServer(SessionService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool listen();
  void stop();

 private:
  SessionService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace greybox::service
