#include "greybox/checklist.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <set>

#include "checklist_internal.hpp"
#include "embedded_data.hpp"
#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"
#include "greybox/spec_io.hpp"

namespace greybox::checklist {

using json_util::ObjectReader;
using nlohmann::json;
namespace m = greybox::model;

const Item* ChecklistTemplate::find(std::string_view id) const {
  for (const auto& item : items)
    if (item.id == id) return &item;
  return nullptr;
}

std::string_view to_string(AnswerKind k) {
  switch (k) {
    case AnswerKind::FreeText: return "free_text";
    case AnswerKind::GoalKind: return "goal_kind";
    case AnswerKind::ObjectiveBlock: return "objective_block";
    case AnswerKind::VariableBlock: return "variable_block";
    case AnswerKind::ConstraintBlock: return "constraint_block";
    case AnswerKind::PairList: return "pair_list";
    case AnswerKind::FormulationBlock: return "formulation_block";
    case AnswerKind::CostBlock: return "cost_block";
    case AnswerKind::ResponsibilityList: return "responsibility_list";
    case AnswerKind::ParticipantList: return "participant_list";
  }
  return "";
}

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Planning: return "planning";
    case Stage::Design: return "design";
    case Stage::Implementation: return "implementation";
    case Stage::Experimentation: return "experimentation";
    case Stage::Application: return "application";
  }
  return "";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pending: return "pending";
    case Status::Answered: return "answered";
    case Status::Skipped: return "skipped";
  }
  return "";
}

std::optional<Stage> stage_from_string(std::string_view s) {
  for (auto st : {Stage::Planning, Stage::Design, Stage::Implementation, Stage::Experimentation,
                  Stage::Application})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

namespace {

std::string_view to_string(ExpandsPer e) {
  switch (e) {
    case ExpandsPer::Objective: return "objective";
    case ExpandsPer::ObjectivePart: return "objective_part";
    case ExpandsPer::Variable: return "variable";
    case ExpandsPer::Constraint: return "constraint";
  }
  return "";
}

// The engine's fixed vocabulary: item ids, their answer kinds and bullet keys.
struct ItemShape {
  std::string_view id;
  AnswerKind kind;
  std::optional<ExpandsPer> expands;
  bool required;
  std::vector<std::string_view> bullets;
};

const std::vector<ItemShape>& vocabulary() {
  static const std::vector<ItemShape> shapes{
      {detail::kParticipants, AnswerKind::ParticipantList, std::nullopt, false, {}},
      {detail::kGoal, AnswerKind::GoalKind, std::nullopt, false, {}},
      {detail::kBackground, AnswerKind::FreeText, std::nullopt, false, {}},
      {detail::kObjectives, AnswerKind::ObjectiveBlock, ExpandsPer::Objective, false,
       {"decomposition", "analytic", "shape", "global_structure", "deterministic", "domain", "cost"}},
      {detail::kVariables, AnswerKind::VariableBlock, ExpandsPer::Variable, false,
       {"domain", "default", "influence", "transform"}},
      {detail::kConstraints, AnswerKind::ConstraintBlock, ExpandsPer::Constraint, false,
       {"known", "a_priori", "relaxable", "quantifiable"}},
      {detail::kConflicts, AnswerKind::PairList, std::nullopt, false, {}},
      {detail::kFormulation, AnswerKind::FormulationBlock, std::nullopt, true, {}},
      {detail::kCost, AnswerKind::CostBlock, std::nullopt, true, {}},
      {detail::kResponsibilities, AnswerKind::ResponsibilityList, std::nullopt, true, {}},
  };
  return shapes;
}

std::optional<AnswerKind> answer_kind_from_string(std::string_view s) {
  for (const auto& shape : vocabulary())
    if (to_string(shape.kind) == s) return shape.kind;
  return std::nullopt;
}

std::optional<ExpandsPer> expands_from_string(std::string_view s) {
  for (auto e : {ExpandsPer::Objective, ExpandsPer::ObjectivePart, ExpandsPer::Variable,
                 ExpandsPer::Constraint})
    if (to_string(e) == s) return e;
  return std::nullopt;
}

ChecklistTemplate template_from_json(const json& doc) {
  ObjectReader root(doc, "");
  ChecklistTemplate tpl;
  tpl.version = static_cast<int>(root.integer("version"));
  const auto& items = root.array("items");
  const auto& vocab = vocabulary();
  if (items.size() != vocab.size())
    json_util::fail("items", "expected " + std::to_string(vocab.size()) + " top-level items");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto path = "items[" + std::to_string(i) + "]";
    ObjectReader r(items[i], path);
    Item item;
    item.id = r.string("id");
    item.prompt = r.string("prompt");
    auto kind_name = r.string("answer_kind");
    auto kind = answer_kind_from_string(kind_name);
    if (!kind) json_util::fail(r.child_path("answer_kind"), "unknown answer kind '" + kind_name + "'");
    item.answer_kind = *kind;
    if (const json* e = r.optional("expands_per")) {
      auto name = json_util::as_string(*e, r.child_path("expands_per"));
      item.expands_per = expands_from_string(name);
      if (!item.expands_per) json_util::fail(r.child_path("expands_per"), "unknown value '" + name + "'");
    }
    item.required_for_finalize = r.boolean("required_for_finalize");
    const auto& bullets = r.array("bullets");
    for (std::size_t b = 0; b < bullets.size(); ++b) {
      ObjectReader br(bullets[b], r.child_path("bullets") + "[" + std::to_string(b) + "]");
      item.bullets.push_back({br.string("key"), br.string("prompt")});
      br.finish();
    }
    r.finish();

    const auto& shape = vocab[i];
    if (item.id != shape.id || item.answer_kind != shape.kind || item.expands_per != shape.expands ||
        item.required_for_finalize != shape.required)
      json_util::fail(path, "item must be '" + std::string(shape.id) + "' with answer_kind '" +
                                std::string(to_string(shape.kind)) + "'");
    std::set<std::string_view> want(shape.bullets.begin(), shape.bullets.end());
    std::set<std::string_view> got;
    for (const auto& b : item.bullets) got.insert(b.key);
    if (want != got || got.size() != item.bullets.size())
      json_util::fail(path + ".bullets", "bullet keys do not match the engine vocabulary");
    tpl.items.push_back(std::move(item));
  }
  root.finish();
  return tpl;
}

}  // namespace

json template_to_json(const ChecklistTemplate& tpl) {
  json items = json::array();
  for (const auto& item : tpl.items) {
    json bullets = json::array();
    for (const auto& b : item.bullets) bullets.push_back({{"key", b.key}, {"prompt", b.prompt}});
    items.push_back({{"id", item.id},
                     {"prompt", item.prompt},
                     {"answer_kind", to_string(item.answer_kind)},
                     {"expands_per", item.expands_per ? json(to_string(*item.expands_per)) : json(nullptr)},
                     {"required_for_finalize", item.required_for_finalize},
                     {"bullets", bullets}});
  }
  return {{"version", tpl.version}, {"items", items}};
}

ChecklistTemplate parse_template(std::string_view document) {
  return template_from_json(json_util::parse_document(document));
}

std::string write_template(const ChecklistTemplate& tpl) {
  return json_util::canonical_dump(template_to_json(tpl));
}

std::shared_ptr<const ChecklistTemplate> default_template_ptr() {
  static const auto tpl =
      std::make_shared<const ChecklistTemplate>(parse_template(greybox::detail::default_template_json()));
  return tpl;
}

const ChecklistTemplate& default_template() { return *default_template_ptr(); }

// --- timestamps -------------------------------------------------------------

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  int y, mo, d, h, mi, sec;
  char tail = 0;
  std::string str(s);
  if (str.size() != 20 ||
      std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &tail) != 7 ||
      tail != 'Z')
    return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 59 || h < 0 || mi < 0 || sec < 0) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

// --- instance ids -------------------------------------------------------------

namespace detail {

std::string make_instance_id(std::string_view item, std::string_view entity, std::string_view bullet) {
  if (entity.empty()) return std::string(item);
  return std::string(item) + ":" + std::string(entity) + ":" + std::string(bullet);
}

}  // namespace detail

namespace {

using States = std::map<std::string, InstanceState>;

const json* answered(const States& states, const std::string& id) {
  auto it = states.find(id);
  if (it == states.end() || it->second.status != Status::Answered) return nullptr;
  return &it->second.answer;
}

[[noreturn]] void mismatch(std::string_view instance, const std::string& problem) {
  throw Error(ErrorKind::AnswerTypeMismatch,
              "answer for '" + std::string(instance) + "' has the wrong shape: " + problem,
              {{"instance", std::string(instance)}, {"problem", problem}});
}

// Decoders translate JSON answers into typed values; structural problems are
// reported as AnswerTypeMismatch for the instance.
template <typename F>
auto decode(std::string_view instance, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) mismatch(instance, e.what());
    throw;
  }
}

std::vector<std::string> decode_names(std::string_view instance, const json& value) {
  return decode(instance, [&] {
    std::vector<std::string> names;
    const auto& arr = json_util::as_array(value, "answer");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      auto path = "answer[" + std::to_string(i) + "]";
      auto name = json_util::as_string(arr[i], path);
      if (!m::is_identifier(name)) json_util::fail(path, "'" + name + "' is not a valid identifier");
      if (!seen.insert(name).second) json_util::fail(path, "duplicate name '" + name + "'");
      names.push_back(std::move(name));
    }
    return names;
  });
}

std::vector<m::PersonRole> decode_people(std::string_view instance, const json& value) {
  return decode(instance, [&] {
    std::vector<m::PersonRole> people;
    const auto& arr = json_util::as_array(value, "answer");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ObjectReader r(arr[i], "answer[" + std::to_string(i) + "]");
      m::PersonRole p{r.string("person"), r.string("role")};
      if (p.person.empty()) json_util::fail(r.child_path("person"), "must not be empty");
      r.finish();
      people.push_back(std::move(p));
    }
    return people;
  });
}

Ternary ternary_field(ObjectReader& r, std::string_view key) {
  return m::enum_from_json<Ternary>(r.required(key), r.child_path(key));
}

std::optional<m::CostEstimate> optional_cost(ObjectReader& r, std::string_view key) {
  if (!r.has(key)) json_util::fail(r.child_path(key), "missing required field");
  if (const json* c = r.optional(key)) return m::cost_from_json(*c, r.child_path(key));
  return std::nullopt;
}

struct Answers {
  const States& states;

  const json* get(std::string_view item, std::string_view entity = {},
                  std::string_view bullet = {}) const {
    return answered(states, detail::make_instance_id(item, entity, bullet));
  }
};

std::vector<std::string> listed(const Answers& a, std::string_view item) {
  const json* v = a.get(item);
  return v ? decode_names(item, *v) : std::vector<std::string>{};
}

std::vector<std::string> objective_parts(const Answers& a, const std::string& path) {
  const auto id = detail::make_instance_id(detail::kObjectives, path, "decomposition");
  const json* v = a.get(detail::kObjectives, path, "decomposition");
  if (!v) return {};
  return decode(id, [&] {
    ObjectReader r(*v, "answer");
    return decode_names(id, r.required("parts"));
  });
}

m::Objective build_objective(const Answers& a, const std::string& path, const std::string& name) {
  m::Objective o;
  o.name = name;
  auto with = [&](std::string_view bullet, auto&& apply) {
    if (const json* v = a.get(detail::kObjectives, path, bullet)) {
      const auto id = detail::make_instance_id(detail::kObjectives, path, bullet);
      decode(id, [&] {
        ObjectReader r(*v, "answer");
        apply(r);
        r.finish();
        return 0;
      });
    }
  };
  with("decomposition", [&](ObjectReader& r) {
    r.required("parts");  // decoded below
    o.additively_separable = ternary_field(r, "additively_separable");
  });
  with("analytic", [&](ObjectReader& r) {
    o.analytic_form = ternary_field(r, "analytic_form");
    o.gradient_available = ternary_field(r, "gradient_available");
  });
  with("shape", [&](ObjectReader& r) {
    o.shape = m::enum_from_json<m::Shape>(r.required("shape"), r.child_path("shape"));
  });
  with("global_structure", [&](ObjectReader& r) {
    o.global_structure = m::enum_from_json<m::GlobalStructure>(r.required("global_structure"),
                                                               r.child_path("global_structure"));
  });
  with("deterministic", [&](ObjectReader& r) { o.deterministic = ternary_field(r, "deterministic"); });
  with("domain", [&](ObjectReader& r) {
    const auto id = detail::make_instance_id(detail::kObjectives, path, "domain");
    o.domain_vars = decode_names(id, r.required("domain_vars"));
    if (!r.has("image_bounds")) json_util::fail("answer.image_bounds", "missing required field");
    if (const json* b = r.optional("image_bounds")) {
      ObjectReader br(*b, "answer.image_bounds");
      o.image_bounds = m::Bounds{br.number("lower"), br.number("upper")};
      br.finish();
    }
  });
  with("cost", [&](ObjectReader& r) { o.cost = optional_cost(r, "cost"); });
  for (const auto& part : objective_parts(a, path))
    o.parts.push_back(build_objective(a, path + "." + part, part));
  return o;
}

m::DecisionVariable build_variable(const Answers& a, const std::string& name) {
  m::DecisionVariable v;
  v.name = name;
  auto with = [&](std::string_view bullet, auto&& apply) {
    if (const json* value = a.get(detail::kVariables, name, bullet)) {
      decode(detail::make_instance_id(detail::kVariables, name, bullet), [&] {
        ObjectReader r(*value, "answer");
        apply(r);
        r.finish();
        return 0;
      });
    }
  };
  with("domain", [&](ObjectReader& r) {
    v.dtype = m::enum_from_json<m::DataType>(r.required("dtype"), r.child_path("dtype"));
    if (!r.has("lower") || !r.has("upper"))
      json_util::fail("answer", "lower and upper must be given (null when unknown)");
    if (const json* lo = r.optional("lower")) v.lower = json_util::as_number(*lo, "answer.lower");
    if (const json* hi = r.optional("upper")) v.upper = json_util::as_number(*hi, "answer.upper");
  });
  with("default", [&](ObjectReader& r) {
    if (!r.has("default")) json_util::fail("answer.default", "missing required field");
    if (const json* d = r.optional("default")) v.default_value = m::value_from_json(*d, "answer.default");
  });
  with("influence", [&](ObjectReader& r) {
    for (const auto& [objective, level] : r.object("influence").items())
      v.influence[objective] = m::enum_from_json<m::Influence>(level, "answer.influence." + objective);
  });
  with("transform", [&](ObjectReader& r) {
    v.transform = m::transform_from_json(r.required("transform"), "answer.transform");
  });
  return v;
}

m::ConstraintSpec build_constraint(const Answers& a, const std::string& name) {
  m::ConstraintSpec c;
  c.name = name;
  auto with = [&](std::string_view bullet, auto&& apply) {
    if (const json* value = a.get(detail::kConstraints, name, bullet)) {
      decode(detail::make_instance_id(detail::kConstraints, name, bullet), [&] {
        ObjectReader r(*value, "answer");
        apply(r);
        r.finish();
        return 0;
      });
    }
  };
  with("known", [&](ObjectReader& r) { c.known = r.boolean("known"); });
  with("a_priori", [&](ObjectReader& r) {
    c.a_priori = ternary_field(r, "a_priori");
    c.cost = optional_cost(r, "cost");
  });
  with("relaxable", [&](ObjectReader& r) { c.relaxable = ternary_field(r, "relaxable"); });
  with("quantifiable", [&](ObjectReader& r) { c.quantifiable = ternary_field(r, "quantifiable"); });

  try {
    c.code = qrak::try_classify(c.known, c.a_priori, c.relaxable, c.quantifiable);
  } catch (const Error& e) {
    throw Error(ErrorKind::QrakInconsistent,
                "constraint '" + name + "': " + std::string(e.what()),
                {{"constraint", name}, {"qrak", e.to_json()}});
  }
  if (!c.known) {
    c.a_priori = c.relaxable = c.quantifiable = Ternary::No;
  }
  return c;
}

}  // namespace

namespace detail {

model::ProblemSpec rebuild_draft(const std::map<std::string, InstanceState>& states) {
  const Answers a{states};
  m::ProblemSpec spec;

  if (const json* v = a.get(kParticipants)) spec.participants = decode_people(kParticipants, *v);
  if (const json* v = a.get(kGoal)) {
    spec.goal = decode(kGoal, [&] { return m::enum_from_json<m::GoalKind>(*v, "answer"); });
  }
  if (const json* v = a.get(kBackground)) {
    spec.background = decode(kBackground, [&] {
      m::Background b;
      if (v->is_string()) {
        b.context = v->get<std::string>();
        return b;
      }
      ObjectReader r(*v, "answer");
      auto text = [&](std::string_view key) -> std::string {
        const json* t = r.optional(key);
        return t ? json_util::as_string(*t, r.child_path(key)) : std::string();
      };
      b.theoretical_relationships = text("theoretical_relationships");
      b.expert_knowledge = text("expert_knowledge");
      b.previous_attempts = text("previous_attempts");
      b.context = text("context");
      r.finish();
      return b;
    });
  }
  for (const auto& name : listed(a, kObjectives)) spec.objectives.push_back(build_objective(a, name, name));
  for (const auto& name : listed(a, kVariables)) spec.variables.push_back(build_variable(a, name));
  for (const auto& name : listed(a, kConstraints)) spec.constraints.push_back(build_constraint(a, name));
  if (const json* v = a.get(kConflicts)) {
    spec.conflicts = decode(kConflicts, [&] {
      std::vector<m::ObjectivePair> pairs;
      const auto& arr = json_util::as_array(*v, "answer");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        auto path = "answer[" + std::to_string(i) + "]";
        const auto& pair = json_util::as_array(arr[i], path);
        if (pair.size() != 2) json_util::fail(path, "expected a pair of objective names");
        pairs.emplace_back(json_util::as_string(pair[0], path + "[0]"),
                           json_util::as_string(pair[1], path + "[1]"));
      }
      return pairs;
    });
  }
  if (const json* v = a.get(kFormulation)) {
    spec.formulation = decode(kFormulation, [&] { return m::formulation_from_json(*v, "answer"); });
  }
  if (const json* v = a.get(kCost)) {
    decode(kCost, [&] {
      ObjectReader r(*v, "answer");
      spec.cost_model = r.string("cost_model");
      spec.budget = optional_cost(r, "budget");
      r.finish();
      return 0;
    });
  }
  if (const json* v = a.get(kResponsibilities))
    spec.responsibilities = decode_people(kResponsibilities, *v);
  return spec;
}

std::vector<ItemInstance> active_instances(const ChecklistTemplate& tpl,
                                           const std::map<std::string, InstanceState>& states) {
  const Answers a{states};
  std::vector<ItemInstance> out;

  std::function<void(const Item&, const std::string&)> expand = [&](const Item& item,
                                                                   const std::string& path) {
    for (const auto& b : item.bullets) {
      out.push_back({make_instance_id(item.id, path, b.key), item.id, path, b.key,
                     "[" + path + "] " + b.prompt, item.answer_kind});
    }
    if (item.answer_kind == AnswerKind::ObjectiveBlock) {
      for (const auto& part : objective_parts(a, path)) expand(item, path + "." + part);
    }
  };

  for (const auto& item : tpl.items) {
    out.push_back({item.id, item.id, "", "", item.prompt, item.answer_kind});
    if (item.expands_per) {
      for (const auto& name : listed(a, item.id)) expand(item, name);
    }
  }
  return out;
}

void sync_states(const ChecklistTemplate& tpl, std::map<std::string, InstanceState>& states) {
  const auto active = active_instances(tpl, states);
  std::set<std::string> active_ids;
  for (const auto& inst : active) {
    active_ids.insert(inst.id);
    states.try_emplace(inst.id, InstanceState{});
  }
  for (auto it = states.begin(); it != states.end();) {
    if (it->second.status == Status::Pending && !active_ids.count(it->first))
      it = states.erase(it);
    else
      ++it;
  }
}

}  // namespace detail

// --- operations -----------------------------------------------------------------

namespace {

json people_json(const std::vector<m::PersonRole>& people) {
  json arr = json::array();
  for (const auto& p : people) arr.push_back({{"person", p.person}, {"role", p.role}});
  return arr;
}

void require_planning(const ChecklistSession& s) {
  if (s.stage != Stage::Planning)
    throw Error(ErrorKind::InvalidStageTransition,
                "session is in stage '" + std::string(to_string(s.stage)) +
                    "'; move it back to planning to change answers",
                {{"stage", to_string(s.stage)}});
}

ChecklistSession commit(const ChecklistSession& base, States states, Timestamp now) {
  ChecklistSession next = base;
  detail::sync_states(*base.tpl, states);
  next.draft = detail::rebuild_draft(states);
  next.states = std::move(states);
  next.revision = base.revision + 1;
  next.updated_at = now;
  return next;
}

const InstanceState& existing_active(const ChecklistSession& s, std::string_view id) {
  auto it = s.states.find(std::string(id));
  bool active = false;
  if (it != s.states.end()) {
    for (const auto& inst : instances(s))
      if (inst.id == id) {
        active = true;
        break;
      }
  }
  if (!active)
    throw Error(ErrorKind::UnknownInstance, "no checklist instance '" + std::string(id) + "'",
                {{"instance", std::string(id)}});
  return it->second;
}

void check_session_id(const std::string& id) {
  if (!m::is_identifier(id))
    throw Error(ErrorKind::InvalidArgument,
                "session id '" + id + "' must use letters, digits, '_' or '-'", {{"id", id}});
}

}  // namespace

ChecklistSession new_session(std::shared_ptr<const ChecklistTemplate> tpl,
                             const std::vector<m::PersonRole>& participants, std::string id,
                             Timestamp now) {
  if (participants.empty())
    throw Error(ErrorKind::EmptyParticipants, "a session needs at least one participant");
  check_session_id(id);
  if (!tpl) tpl = default_template_ptr();
  ChecklistSession s;
  s.id = std::move(id);
  s.template_version = tpl->version;
  s.tpl = std::move(tpl);
  s.created_at = s.updated_at = now;
  s.states[std::string(detail::kParticipants)] = {Status::Answered, people_json(participants), ""};
  // Validates participant entries.
  detail::sync_states(*s.tpl, s.states);
  s.draft = detail::rebuild_draft(s.states);
  return s;
}

ChecklistSession reopen_session(std::shared_ptr<const ChecklistTemplate> tpl,
                                const m::ProblemSpec& spec,
                                const std::vector<m::PersonRole>& participants, std::string id,
                                Timestamp now) {
  const auto& people = participants.empty() ? spec.participants : participants;
  ChecklistSession s = new_session(std::move(tpl), people, std::move(id), now);
  using detail::make_instance_id;
  States st = s.states;
  auto put = [&](std::string_view key, json value) {
    st[std::string(key)] = {Status::Answered, std::move(value), ""};
  };
  auto skip_missing = [&](const std::string& key) {
    st[key] = {Status::Skipped, nullptr, "not recorded in the previous iteration"};
  };

  if (spec.goal) put(detail::kGoal, std::string(m::to_string(*spec.goal)));
  put(detail::kBackground, {{"theoretical_relationships", spec.background.theoretical_relationships},
                            {"expert_knowledge", spec.background.expert_knowledge},
                            {"previous_attempts", spec.background.previous_attempts},
                            {"context", spec.background.context}});

  std::function<void(const m::Objective&, const std::string&)> put_objective =
      [&](const m::Objective& o, const std::string& path) {
        auto key = [&](std::string_view bullet) {
          return make_instance_id(detail::kObjectives, path, bullet);
        };
        json parts = json::array();
        for (const auto& p : o.parts) parts.push_back(p.name);
        put(key("decomposition"),
            {{"parts", parts}, {"additively_separable", to_string(o.additively_separable)}});
        put(key("analytic"), {{"analytic_form", to_string(o.analytic_form)},
                              {"gradient_available", to_string(o.gradient_available)}});
        put(key("shape"), {{"shape", m::to_string(o.shape)}});
        put(key("global_structure"), {{"global_structure", m::to_string(o.global_structure)}});
        put(key("deterministic"), {{"deterministic", to_string(o.deterministic)}});
        put(key("domain"), {{"domain_vars", o.domain_vars},
                            {"image_bounds", o.image_bounds ? json{{"lower", o.image_bounds->lower},
                                                                   {"upper", o.image_bounds->upper}}
                                                            : json(nullptr)}});
        if (o.cost)
          put(key("cost"), {{"cost", m::cost_to_json(*o.cost)}});
        else
          skip_missing(key("cost"));
        for (const auto& p : o.parts) put_objective(p, path + "." + p.name);
      };

  json names = json::array();
  for (const auto& o : spec.objectives) names.push_back(o.name);
  put(detail::kObjectives, names);
  for (const auto& o : spec.objectives) put_objective(o, o.name);

  names = json::array();
  for (const auto& v : spec.variables) names.push_back(v.name);
  put(detail::kVariables, names);
  for (const auto& v : spec.variables) {
    auto key = [&](std::string_view bullet) { return make_instance_id(detail::kVariables, v.name, bullet); };
    put(key("domain"), {{"dtype", m::to_string(v.dtype)},
                        {"lower", v.lower ? json(*v.lower) : json(nullptr)},
                        {"upper", v.upper ? json(*v.upper) : json(nullptr)}});
    put(key("default"), {{"default", v.default_value ? m::value_to_json(*v.default_value) : json(nullptr)}});
    json influence = json::object();
    for (const auto& [obj, level] : v.influence) influence[obj] = m::to_string(level);
    put(key("influence"), {{"influence", influence}});
    put(key("transform"), {{"transform", m::transform_to_json(v.transform)}});
  }

  names = json::array();
  for (const auto& c : spec.constraints) names.push_back(c.name);
  put(detail::kConstraints, names);
  for (const auto& c : spec.constraints) {
    auto key = [&](std::string_view bullet) { return make_instance_id(detail::kConstraints, c.name, bullet); };
    put(key("known"), {{"known", c.known}});
    put(key("a_priori"), {{"a_priori", to_string(c.a_priori)},
                          {"cost", c.cost ? m::cost_to_json(*c.cost) : json(nullptr)}});
    put(key("relaxable"), {{"relaxable", to_string(c.relaxable)}});
    put(key("quantifiable"), {{"quantifiable", to_string(c.quantifiable)}});
  }

  json pairs = json::array();
  for (const auto& [x, y] : spec.conflicts) pairs.push_back({x, y});
  put(detail::kConflicts, pairs);
  if (spec.formulation) put(detail::kFormulation, m::formulation_to_json(*spec.formulation));
  put(detail::kCost, {{"cost_model", spec.cost_model},
                      {"budget", spec.budget ? m::cost_to_json(*spec.budget) : json(nullptr)}});
  put(detail::kResponsibilities, people_json(spec.responsibilities));

  detail::sync_states(*s.tpl, st);
  s.draft = detail::rebuild_draft(st);
  s.states = std::move(st);
  return s;
}

std::vector<ItemInstance> instances(const ChecklistSession& session) {
  return detail::active_instances(*session.tpl, session.states);
}

std::vector<ItemInstance> pending_instances(const ChecklistSession& session) {
  std::vector<ItemInstance> out;
  for (auto& inst : instances(session)) {
    auto it = session.states.find(inst.id);
    if (it != session.states.end() && it->second.status == Status::Pending) out.push_back(std::move(inst));
  }
  return out;
}

Progress progress(const ChecklistSession& session) {
  Progress p;
  for (const auto& [_, st] : session.states) {
    switch (st.status) {
      case Status::Pending: ++p.pending; break;
      case Status::Answered: ++p.answered; break;
      case Status::Skipped: ++p.skipped; break;
    }
  }
  return p;
}

std::optional<ItemInstance> next_item(const ChecklistSession& session,
                                      std::optional<std::string_view> jump) {
  auto pending = pending_instances(session);
  if (jump) {
    for (auto& inst : pending)
      if (inst.id == *jump) return std::move(inst);
    throw Error(ErrorKind::UnknownInstance,
                "no pending checklist instance '" + std::string(*jump) + "'",
                {{"instance", std::string(*jump)}});
  }
  if (pending.empty()) return std::nullopt;
  return std::move(pending.front());
}

ChecklistSession answer(const ChecklistSession& session, std::string_view instance_id,
                        const json& value, Timestamp now) {
  require_planning(session);
  existing_active(session, instance_id);
  const std::string id(instance_id);

  if (id == detail::kParticipants && decode_people(id, value).empty())
    throw Error(ErrorKind::EmptyParticipants, "a session needs at least one participant");
  if (value.is_null()) mismatch(id, "answer must not be null");

  States states = session.states;
  states[id] = {Status::Answered, value, ""};

  // A hidden constraint is NUSH whatever the remaining questions would say;
  // their pending instances are closed so the team does not have to answer them.
  const auto parts = [&] {
    auto first = id.find(':');
    auto last = id.rfind(':');
    return std::array<std::string, 3>{id.substr(0, first),
                                      first == std::string::npos ? "" : id.substr(first + 1, last - first - 1),
                                      first == std::string::npos ? "" : id.substr(last + 1)};
  }();
  if (parts[0] == detail::kConstraints && parts[2] == "known" && value.is_object() &&
      value.contains("known") && value["known"] == false) {
    for (std::string_view bullet : {"a_priori", "relaxable", "quantifiable"}) {
      auto sibling = detail::make_instance_id(detail::kConstraints, parts[1], bullet);
      auto it = states.find(sibling);
      if (it != states.end() && it->second.status == Status::Pending)
        it->second = {Status::Skipped, nullptr, "implied by hidden constraint (NUSH)"};
    }
  }
  return commit(session, std::move(states), now);
}

ChecklistSession skip(const ChecklistSession& session, std::string_view instance_id,
                      std::string_view reason, Timestamp now) {
  require_planning(session);
  const auto& state = existing_active(session, instance_id);
  const std::string id(instance_id);
  if (const Item* item = session.tpl->find(id); item && item->required_for_finalize)
    throw Error(ErrorKind::RequiredItem, "'" + id + "' is required and cannot be skipped",
                {{"instance", id}});
  if (id == detail::kConflicts && session.draft.formulation &&
      session.draft.formulation->selected_objectives.size() > 1)
    throw Error(ErrorKind::RequiredItem,
                "conflicting pairs must be discussed when several objectives are selected",
                {{"instance", id}});
  if (reason.find_first_not_of(" \t\r\n") == std::string_view::npos)
    throw Error(ErrorKind::EmptyReason, "skipping needs a reason", {{"instance", id}});
  if (state.status != Status::Pending)
    throw Error(ErrorKind::InvalidArgument, "'" + id + "' is not pending",
                {{"instance", id}, {"status", to_string(state.status)}});

  States states = session.states;
  states[id] = {Status::Skipped, nullptr, std::string(reason)};
  return commit(session, std::move(states), now);
}

Finalized finalize(const ChecklistSession& session, Timestamp now) {
  require_planning(session);
  std::vector<std::string> pending, required;
  for (const auto& inst : pending_instances(session)) pending.push_back(inst.id);
  for (const auto& item : session.tpl->items) {
    if (!item.required_for_finalize) continue;
    auto it = session.states.find(item.id);
    if (it == session.states.end() || it->second.status != Status::Answered) required.push_back(item.id);
  }
  const auto& draft = session.draft;
  if (draft.formulation && draft.formulation->selected_objectives.size() > 1) {
    auto it = session.states.find(std::string(detail::kConflicts));
    if (it != session.states.end() && it->second.status == Status::Skipped)
      required.emplace_back(detail::kConflicts);
  }
  if (!pending.empty() || !required.empty()) {
    std::string msg = "session is incomplete:";
    for (const auto& id : required) msg += " " + id + " (required)";
    for (const auto& id : pending) msg += " " + id;
    throw Error(ErrorKind::IncompleteSession, msg, {{"pending", pending}, {"required", required}});
  }

  auto findings = m::validate_spec(draft);
  if (m::has_errors(findings)) {
    std::vector<m::Finding> errors;
    std::copy_if(findings.begin(), findings.end(), std::back_inserter(errors),
                 [](const m::Finding& f) { return f.severity == m::Severity::Error; });
    std::string msg = "finalized spec has lint errors:";
    for (const auto& f : errors) msg += " " + f.code + "(" + f.subject + ")";
    throw Error(ErrorKind::SpecInvalid, msg, {{"findings", m::findings_to_json(errors)}});
  }

  Finalized out{draft, session};
  out.session.stage = Stage::Design;
  out.session.revision = session.revision + 1;
  out.session.updated_at = now;
  return out;
}

ChecklistSession set_stage(const ChecklistSession& session, Stage stage, Timestamp now) {
  const bool forward = static_cast<int>(stage) > static_cast<int>(session.stage);
  const bool new_cycle = stage == Stage::Planning && session.stage != Stage::Planning;
  if (!forward && !new_cycle)
    throw Error(ErrorKind::InvalidStageTransition,
                "cannot move from '" + std::string(to_string(session.stage)) + "' to '" +
                    std::string(to_string(stage)) + "'",
                {{"from", to_string(session.stage)}, {"to", to_string(stage)}});
  ChecklistSession next = session;
  next.stage = stage;
  next.revision = session.revision + 1;
  next.updated_at = now;
  return next;
}

json instance_to_json(const ItemInstance& inst) {
  return {{"id", inst.id},
          {"item_id", inst.item_id},
          {"entity", inst.entity},
          {"bullet", inst.bullet},
          {"prompt", inst.prompt},
          {"answer_kind", to_string(inst.answer_kind)}};
}

}  // namespace greybox::checklist
