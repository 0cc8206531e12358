#pragma once

// Filesystem-backed checklist sessions, shared by the CLI and the HTTP API.
//
// One file per session (<data_dir>/<id>.session) and, once finalized, one
// per spec (<data_dir>/<id>.spec.json). Mutations on one session are
// serialized; reads use the last committed snapshot without locking it.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "greybox/checklist.hpp"
#include "greybox/errors.hpp"

namespace greybox::service {

using checklist::Timestamp;

/// SOURCE_DATE_EPOCH when set (reproducible runs), else the system clock.
Timestamp current_time();

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view bytes);

/// Summary returned after every read or mutation: next instance, progress,
/// pending list, draft spec and its lint findings.
nlohmann::json session_view(const checklist::ChecklistSession& session);

struct Reply {
  int status = 200;
  nlohmann::json body;
};

class SessionService {
 public:
  struct Options {
    std::filesystem::path data_dir = ".";
    std::function<Timestamp()> clock = current_time;
    std::shared_ptr<const checklist::ChecklistTemplate> tpl;
  };

  explicit SessionService(Options options);

  /// body: {"participants": [{"person", "role"}], "id"?}
  Reply create(const nlohmann::json& body);
  Reply next(const std::string& id, const std::optional<std::string>& jump = std::nullopt);
  /// body: {"revision", "instance", "value"}
  Reply answer(const std::string& id, const nlohmann::json& body);
  /// body: {"revision", "instance", "reason"}
  Reply skip(const std::string& id, const nlohmann::json& body);
  /// body: {"revision"}
  Reply finalize(const std::string& id, const nlohmann::json& body);
  Reply spec(const std::string& id);
  Reply default_template() const;

  std::filesystem::path session_path(const std::string& id) const;
  std::filesystem::path spec_path(const std::string& id) const;

 private:
  struct Entry {
    std::mutex write;
    std::shared_ptr<const checklist::ChecklistSession> snapshot;
  };

  std::shared_ptr<Entry> lookup(const std::string& id);
  template <typename Mutation>
  Reply mutate(const std::string& id, const nlohmann::json& body, Mutation&& m);

  Options options_;
  std::mutex registry_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t generated_ = 0;
};

/// A malformed request (missing fields, JSON syntax); answered with 400.
class BadRequest : public Error {
 public:
  BadRequest(const std::string& message, nlohmann::json details = nullptr)
      : Error(ErrorKind::InvalidArgument, message, std::move(details)) {}
};

/// Maps an exception to an HTTP status and the error payload: 400 for
/// BadRequest, 500 for I/O and unexpected failures, 422 for engine errors.
Reply error_reply(const std::exception& e);

}  // namespace greybox::service
