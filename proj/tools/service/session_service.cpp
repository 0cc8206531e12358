#include "session_service.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"
#include "greybox/spec_io.hpp"

namespace greybox::service {

namespace fs = std::filesystem;
using nlohmann::json;

Timestamp current_time() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    try {
      return Timestamp{std::chrono::seconds{std::stoll(epoch)}};
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "SOURCE_DATE_EPOCH must be an integer");
    }
  }
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string(), {{"path", path.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string(), {{"path", path.string()}});
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string(), {{"path", path.string()}});
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot replace " + path.string() + ": " + ec.message());
}

json session_view(const checklist::ChecklistSession& s) {
  json pending = json::array();
  for (const auto& inst : checklist::pending_instances(s)) pending.push_back(checklist::instance_to_json(inst));
  const auto next = s.stage == checklist::Stage::Planning ? checklist::next_item(s) : std::nullopt;
  const auto p = checklist::progress(s);
  return {{"id", s.id},
          {"revision", s.revision},
          {"stage", checklist::to_string(s.stage)},
          {"next", next ? checklist::instance_to_json(*next) : json(nullptr)},
          {"progress", {{"answered", p.answered}, {"skipped", p.skipped}, {"pending", p.pending}}},
          {"pending", pending},
          {"draft", model::spec_to_json(s.draft)},
          {"findings", model::findings_to_json(model::validate_spec(s.draft))}};
}

Reply error_reply(const std::exception& e) {
  if (const auto* bad = dynamic_cast<const BadRequest*>(&e)) return {400, bad->to_json()};
  if (const auto* err = dynamic_cast<const Error*>(&e)) return {err->kind() == ErrorKind::Io ? 500 : 422, err->to_json()};
  return {500, {{"error", "Internal"}, {"message", e.what()}, {"details", nullptr}}};
}

SessionService::SessionService(Options options) : options_(std::move(options)) {
  if (!options_.tpl) options_.tpl = checklist::default_template_ptr();
  if (!options_.clock) options_.clock = current_time;
  fs::create_directories(options_.data_dir);
}

fs::path SessionService::session_path(const std::string& id) const {
  return options_.data_dir / (id + ".session");
}

fs::path SessionService::spec_path(const std::string& id) const {
  return options_.data_dir / (id + ".spec.json");
}

std::shared_ptr<SessionService::Entry> SessionService::lookup(const std::string& id) {
  std::lock_guard lock(registry_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (!model::is_identifier(id) || !fs::exists(session_path(id))) return nullptr;
  auto entry = std::make_shared<Entry>();
  entry->snapshot = std::make_shared<const checklist::ChecklistSession>(
      checklist::load_session(read_file(session_path(id)), options_.tpl));
  sessions_.emplace(id, entry);
  return entry;
}

namespace {

Reply not_found(const std::string& id) {
  return {404, {{"error", "UnknownSession"}, {"message", "no session '" + id + "'"}, {"details", {{"id", id}}}}};
}

std::int64_t required_revision(const json& body) {
  if (!body.is_object() || !body.contains("revision") || !body["revision"].is_number_integer())
    throw BadRequest("mutations must send the current integer 'revision'",
                {{"field", "revision"}});
  return body["revision"].get<std::int64_t>();
}

std::string required_string(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string())
    throw BadRequest(std::string("missing string field '") + key + "'", {{"field", key}});
  return body[key].get<std::string>();
}

}  // namespace

Reply SessionService::create(const json& body) {
  try {
    if (!body.is_object() || !body.contains("participants"))
      throw BadRequest("body needs 'participants'", {{"field", "participants"}});
    std::vector<model::PersonRole> people;
    const auto& arr = json_util::as_array(body["participants"], "participants");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      json_util::ObjectReader r(arr[i], "participants[" + std::to_string(i) + "]");
      people.push_back({r.string("person"), r.string("role")});
      r.finish();
    }
    std::string id;
    if (body.contains("id") && !body["id"].is_null()) {
      id = required_string(body, "id");
    } else {
      std::random_device rd;
      std::ostringstream os;
      os << "s" << std::hex << rd() << rd();
      id = os.str();
    }
    auto session = checklist::new_session(options_.tpl, people, id, options_.clock());

    std::lock_guard lock(registry_);
    if (sessions_.count(id) || fs::exists(session_path(id)))
      return {409, {{"error", "SessionExists"}, {"message", "session '" + id + "' already exists"}, {"details", {{"id", id}}}}};
    write_file(session_path(id), checklist::save_session(session));
    auto entry = std::make_shared<Entry>();
    entry->snapshot = std::make_shared<const checklist::ChecklistSession>(std::move(session));
    sessions_.emplace(id, entry);
    return {201, session_view(*entry->snapshot)};
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

Reply SessionService::next(const std::string& id, const std::optional<std::string>& jump) {
  try {
    auto entry = lookup(id);
    if (!entry) return not_found(id);
    auto snap = std::atomic_load(&entry->snapshot);
    json view = session_view(*snap);
    if (jump) {
      auto inst = checklist::next_item(*snap, *jump);
      view["next"] = checklist::instance_to_json(*inst);
    }
    return {200, view};
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

template <typename Mutation>
Reply SessionService::mutate(const std::string& id, const json& body, Mutation&& m) {
  try {
    auto entry = lookup(id);
    if (!entry) return not_found(id);
    const auto revision = required_revision(body);
    std::lock_guard lock(entry->write);
    auto current = std::atomic_load(&entry->snapshot);
    if (revision != current->revision)
      return {409,
              {{"error", "StaleRevision"},
               {"message", "revision " + std::to_string(revision) + " is stale; current is " +
                               std::to_string(current->revision)},
               {"details", {{"revision", revision}, {"current", current->revision}}}}};
    auto updated = m(*current);
    write_file(session_path(id), checklist::save_session(updated));
    auto next = std::make_shared<const checklist::ChecklistSession>(std::move(updated));
    std::atomic_store(&entry->snapshot, next);
    return {200, session_view(*next)};
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

Reply SessionService::answer(const std::string& id, const json& body) {
  return mutate(id, body, [&](const checklist::ChecklistSession& s) {
    if (!body.contains("value")) throw BadRequest("missing field 'value'", {{"field", "value"}});
    return checklist::answer(s, required_string(body, "instance"), body["value"], options_.clock());
  });
}

Reply SessionService::skip(const std::string& id, const json& body) {
  return mutate(id, body, [&](const checklist::ChecklistSession& s) {
    return checklist::skip(s, required_string(body, "instance"), required_string(body, "reason"),
                           options_.clock());
  });
}

Reply SessionService::finalize(const std::string& id, const json& body) {
  return mutate(id, body, [&](const checklist::ChecklistSession& s) {
    auto done = checklist::finalize(s, options_.clock());
    write_file(spec_path(id), model::write_spec(done.spec));
    return std::move(done.session);
  });
}

Reply SessionService::spec(const std::string& id) {
  try {
    auto entry = lookup(id);
    if (!entry) return not_found(id);
    auto snap = std::atomic_load(&entry->snapshot);
    if (snap->stage == checklist::Stage::Planning || !fs::exists(spec_path(id)))
      throw Error(ErrorKind::Unfinalized, "session '" + id + "' has not been finalized", {{"id", id}});
    return {200, json_util::parse_document(read_file(spec_path(id)))};
  } catch (const std::exception& e) {
    return error_reply(e);
  }
}

Reply SessionService::default_template() const {
  return {200, checklist::template_to_json(*options_.tpl)};
}

}  // namespace greybox::service
