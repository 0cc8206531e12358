#include "checklist_internal.hpp"
#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"

namespace greybox::checklist {

using json_util::ObjectReader;
using nlohmann::json;

json session_to_json(const ChecklistSession& session) {
  json states = json::object();
  for (const auto& [id, st] : session.states) {
    json entry{{"status", to_string(st.status)}};
    if (st.status == Status::Answered) entry["answer"] = st.answer;
    if (st.status == Status::Skipped) entry["reason"] = st.reason;
    states[id] = std::move(entry);
  }
  return {{"schema_version", model::kSchemaVersion},
          {"id", session.id},
          {"template_version", session.template_version},
          {"revision", session.revision},
          {"stage", to_string(session.stage)},
          {"created_at", format_timestamp(session.created_at)},
          {"updated_at", format_timestamp(session.updated_at)},
          {"states", states}};
}

std::string save_session(const ChecklistSession& session) {
  return json_util::canonical_dump(session_to_json(session));
}

namespace {

Timestamp timestamp_field(ObjectReader& r, std::string_view key) {
  auto text = r.string(key);
  auto t = parse_timestamp(text);
  if (!t) json_util::fail(r.child_path(key), "expected YYYY-MM-DDTHH:MM:SSZ, got '" + text + "'");
  return *t;
}

}  // namespace

ChecklistSession load_session(std::string_view document,
                              std::shared_ptr<const ChecklistTemplate> tpl) {
  if (!tpl) tpl = default_template_ptr();
  const json doc = json_util::parse_document(document);
  ObjectReader r(doc, "");
  const auto schema = r.integer("schema_version");
  if (schema != model::kSchemaVersion)
    throw Error(ErrorKind::Version, "unsupported session schema_version " + std::to_string(schema),
                {{"schema_version", schema}, {"supported", model::kSchemaVersion}});
  const auto tv = r.integer("template_version");
  if (tv != tpl->version)
    throw Error(ErrorKind::Version,
                "session was recorded with template version " + std::to_string(tv) +
                    ", the loaded template is version " + std::to_string(tpl->version),
                {{"template_version", tv}, {"expected", tpl->version}});

  ChecklistSession s;
  s.id = r.string("id");
  if (!model::is_identifier(s.id)) json_util::fail("id", "not a valid session id");
  s.template_version = static_cast<int>(tv);
  s.revision = r.integer("revision");
  if (s.revision < 1) json_util::fail("revision", "must be >= 1");
  auto stage_name = r.string("stage");
  auto stage = stage_from_string(stage_name);
  if (!stage) json_util::fail("stage", "unknown stage '" + stage_name + "'");
  s.stage = *stage;
  s.created_at = timestamp_field(r, "created_at");
  s.updated_at = timestamp_field(r, "updated_at");

  const json& states = r.object("states");
  for (const auto& [id, entry] : states.items()) {
    ObjectReader er(entry, "states." + id);
    auto status = er.string("status");
    InstanceState st;
    if (status == "pending") {
      st.status = Status::Pending;
    } else if (status == "answered") {
      st.status = Status::Answered;
      st.answer = er.required("answer");
    } else if (status == "skipped") {
      st.status = Status::Skipped;
      st.reason = er.string("reason");
      if (st.reason.empty()) json_util::fail(er.child_path("reason"), "must not be empty");
    } else {
      json_util::fail(er.child_path("status"), "unknown status '" + status + "'");
    }
    er.finish();
    s.states.emplace(id, std::move(st));
  }
  r.finish();

  try {
    detail::sync_states(*tpl, s.states);
    s.draft = detail::rebuild_draft(s.states);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    throw Error(ErrorKind::Parse, std::string("session answers are inconsistent: ") + e.what(),
                {{"cause", e.to_json()}});
  }
  s.tpl = std::move(tpl);
  return s;
}

}  // namespace greybox::checklist
