#include "greybox/spec_io.hpp"

#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"

namespace greybox::model {

using json_util::ObjectReader;
using nlohmann::json;

namespace {

template <typename Enum>
std::optional<Enum> lookup(std::string_view s);
template <> std::optional<GoalKind> lookup(std::string_view s) { return goal_from_string(s); }
template <> std::optional<Shape> lookup(std::string_view s) { return shape_from_string(s); }
template <> std::optional<GlobalStructure> lookup(std::string_view s) { return structure_from_string(s); }
template <> std::optional<DataType> lookup(std::string_view s) { return dtype_from_string(s); }
template <> std::optional<Influence> lookup(std::string_view s) { return influence_from_string(s); }
template <> std::optional<Paradigm> lookup(std::string_view s) { return paradigm_from_string(s); }
template <> std::optional<CostKind> lookup(std::string_view s) { return cost_kind_from_string(s); }
template <> std::optional<Ternary> lookup(std::string_view s) { return ternary_from_string(s); }

std::vector<std::string> names_from_json(const json& value, const std::string& path) {
  std::vector<std::string> out;
  const auto& arr = json_util::as_array(value, path);
  for (std::size_t i = 0; i < arr.size(); ++i)
    out.push_back(json_util::as_string(arr[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json people_to_json(const std::vector<PersonRole>& people) {
  json arr = json::array();
  for (const auto& p : people) arr.push_back({{"person", p.person}, {"role", p.role}});
  return arr;
}

std::vector<PersonRole> people_from_json(const json& value, const std::string& path) {
  std::vector<PersonRole> out;
  const auto& arr = json_util::as_array(value, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    ObjectReader r(arr[i], path + "[" + std::to_string(i) + "]");
    out.push_back({r.string("person"), r.string("role")});
    r.finish();
  }
  return out;
}

Objective objective_from_json(const json& value, const std::string& path) {
  ObjectReader r(value, path);
  Objective o;
  o.name = r.string("name");
  const auto& parts = r.array("parts");
  for (std::size_t i = 0; i < parts.size(); ++i)
    o.parts.push_back(objective_from_json(parts[i], r.child_path("parts") + "[" + std::to_string(i) + "]"));
  o.additively_separable = enum_from_json<Ternary>(r.required("additively_separable"), r.child_path("additively_separable"));
  o.analytic_form = enum_from_json<Ternary>(r.required("analytic_form"), r.child_path("analytic_form"));
  o.gradient_available = enum_from_json<Ternary>(r.required("gradient_available"), r.child_path("gradient_available"));
  o.shape = enum_from_json<Shape>(r.required("shape"), r.child_path("shape"));
  o.global_structure = enum_from_json<GlobalStructure>(r.required("global_structure"), r.child_path("global_structure"));
  o.deterministic = enum_from_json<Ternary>(r.required("deterministic"), r.child_path("deterministic"));
  o.domain_vars = names_from_json(r.required("domain_vars"), r.child_path("domain_vars"));
  if (const json* b = r.optional("image_bounds")) {
    ObjectReader br(*b, r.child_path("image_bounds"));
    o.image_bounds = Bounds{br.number("lower"), br.number("upper")};
    br.finish();
  }
  if (const json* c = r.optional("cost")) o.cost = cost_from_json(*c, r.child_path("cost"));
  r.finish();
  return o;
}

DecisionVariable variable_from_json(const json& value, const std::string& path) {
  ObjectReader r(value, path);
  DecisionVariable v;
  v.name = r.string("name");
  v.dtype = enum_from_json<DataType>(r.required("dtype"), r.child_path("dtype"));
  if (const json* lo = r.optional("lower")) v.lower = json_util::as_number(*lo, r.child_path("lower"));
  if (const json* hi = r.optional("upper")) v.upper = json_util::as_number(*hi, r.child_path("upper"));
  if (const json* d = r.optional("default")) v.default_value = value_from_json(*d, r.child_path("default"));
  const auto& infl = r.object("influence");
  for (const auto& [objective, level] : infl.items())
    v.influence[objective] = enum_from_json<Influence>(level, r.child_path("influence") + "." + objective);
  v.transform = transform_from_json(r.required("transform"), r.child_path("transform"));
  r.finish();
  return v;
}

ConstraintSpec constraint_from_json(const json& value, const std::string& path) {
  ObjectReader r(value, path);
  ConstraintSpec c;
  c.name = r.string("name");
  c.known = r.boolean("known");
  c.a_priori = enum_from_json<Ternary>(r.required("a_priori"), r.child_path("a_priori"));
  c.relaxable = enum_from_json<Ternary>(r.required("relaxable"), r.child_path("relaxable"));
  c.quantifiable = enum_from_json<Ternary>(r.required("quantifiable"), r.child_path("quantifiable"));
  if (const json* cost = r.optional("cost")) c.cost = cost_from_json(*cost, r.child_path("cost"));

  if (!c.known && (c.a_priori != Ternary::No || c.relaxable != Ternary::No ||
                   c.quantifiable != Ternary::No))
    json_util::fail(path, "a hidden constraint must answer a_priori, relaxable and quantifiable with 'no'");
  std::optional<qrak::QrakCode> derived;
  try {
    derived = qrak::try_classify(c.known, c.a_priori, c.relaxable, c.quantifiable);
  } catch (const Error& e) {
    json_util::fail(path, e.what());
  }
  std::optional<qrak::QrakCode> stated;
  if (const json* code = r.optional("code"))
    stated = qrak::QrakCode::parse(json_util::as_string(*code, r.child_path("code")));
  if (stated != derived)
    json_util::fail(r.child_path("code"),
                    "does not match the classification of the constraint flags (expected " +
                        (derived ? derived->rendered() : std::string("null")) + ")");
  c.code = derived;
  r.finish();
  return c;
}

}  // namespace

template <typename Enum>
Enum enum_from_json(const json& value, const std::string& path) {
  auto s = json_util::as_string(value, path);
  auto e = lookup<Enum>(s);
  if (!e) json_util::fail(path, "unknown value '" + s + "'");
  return *e;
}

template GoalKind enum_from_json<GoalKind>(const json&, const std::string&);
template Shape enum_from_json<Shape>(const json&, const std::string&);
template GlobalStructure enum_from_json<GlobalStructure>(const json&, const std::string&);
template DataType enum_from_json<DataType>(const json&, const std::string&);
template Influence enum_from_json<Influence>(const json&, const std::string&);
template Paradigm enum_from_json<Paradigm>(const json&, const std::string&);
template CostKind enum_from_json<CostKind>(const json&, const std::string&);
template Ternary enum_from_json<Ternary>(const json&, const std::string&);

json cost_to_json(const CostEstimate& cost) {
  return {{"kind", to_string(cost.kind)},
          {"distribution", cost.distribution},
          {"low", cost.low},
          {"high", cost.high},
          {"unit", cost.unit}};
}

CostEstimate cost_from_json(const json& value, const std::string& path) {
  ObjectReader r(value, path);
  CostEstimate c;
  c.kind = enum_from_json<CostKind>(r.required("kind"), r.child_path("kind"));
  if (const json* d = r.optional("distribution"))
    c.distribution = json_util::as_string(*d, r.child_path("distribution"));
  c.low = r.number("low");
  c.high = r.number("high");
  c.unit = r.string("unit");
  r.finish();
  return c;
}

json value_to_json(const Value& value) {
  return std::visit([](const auto& v) { return json(v); }, value);
}

Value value_from_json(const json& value, const std::string& path) {
  if (value.is_boolean()) return value.get<bool>();
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) return value.get<double>();
  if (value.is_string()) return value.get<std::string>();
  json_util::fail(path, "expected a scalar value");
}

json transform_to_json(const Transform& t) {
  switch (t.kind) {
    case Transform::Kind::None: return "none";
    case Transform::Kind::Log: return "log";
    case Transform::Kind::Sqrt: return "sqrt";
    case Transform::Kind::Custom: return "custom:" + t.label;
  }
  return "none";
}

Transform transform_from_json(const json& value, const std::string& path) {
  auto s = json_util::as_string(value, path);
  if (s == "none") return {};
  if (s == "log") return {Transform::Kind::Log, ""};
  if (s == "sqrt") return {Transform::Kind::Sqrt, ""};
  if (s.rfind("custom:", 0) == 0 && s.size() > 7) return {Transform::Kind::Custom, s.substr(7)};
  json_util::fail(path, "expected none, log, sqrt or custom:<label>, got '" + s + "'");
}

json objective_to_json(const Objective& o) {
  json parts = json::array();
  for (const auto& p : o.parts) parts.push_back(objective_to_json(p));
  return {{"name", o.name},
          {"parts", parts},
          {"additively_separable", to_string(o.additively_separable)},
          {"analytic_form", to_string(o.analytic_form)},
          {"gradient_available", to_string(o.gradient_available)},
          {"shape", to_string(o.shape)},
          {"global_structure", to_string(o.global_structure)},
          {"deterministic", to_string(o.deterministic)},
          {"domain_vars", o.domain_vars},
          {"image_bounds", o.image_bounds ? json{{"lower", o.image_bounds->lower},
                                                 {"upper", o.image_bounds->upper}}
                                          : json(nullptr)},
          {"cost", o.cost ? cost_to_json(*o.cost) : json(nullptr)}};
}

json variable_to_json(const DecisionVariable& v) {
  json influence = json::object();
  for (const auto& [objective, level] : v.influence) influence[objective] = to_string(level);
  return {{"name", v.name},
          {"dtype", to_string(v.dtype)},
          {"lower", optional_number(v.lower)},
          {"upper", optional_number(v.upper)},
          {"default", v.default_value ? value_to_json(*v.default_value) : json(nullptr)},
          {"influence", influence},
          {"transform", transform_to_json(v.transform)}};
}

json constraint_to_json(const ConstraintSpec& c) {
  return {{"name", c.name},
          {"known", c.known},
          {"a_priori", to_string(c.a_priori)},
          {"relaxable", to_string(c.relaxable)},
          {"quantifiable", to_string(c.quantifiable)},
          {"cost", c.cost ? cost_to_json(*c.cost) : json(nullptr)},
          {"code", c.code ? json(c.code->rendered()) : json(nullptr)}};
}

json formulation_to_json(const Formulation& f) {
  return {{"selected_objectives", f.selected_objectives},
          {"selected_variables", f.selected_variables},
          {"selected_constraints", f.selected_constraints},
          {"paradigm", to_string(f.paradigm)}};
}

Formulation formulation_from_json(const json& value, const std::string& path) {
  ObjectReader r(value, path);
  Formulation f;
  f.selected_objectives = names_from_json(r.required("selected_objectives"), r.child_path("selected_objectives"));
  f.selected_variables = names_from_json(r.required("selected_variables"), r.child_path("selected_variables"));
  f.selected_constraints = names_from_json(r.required("selected_constraints"), r.child_path("selected_constraints"));
  f.paradigm = enum_from_json<Paradigm>(r.required("paradigm"), r.child_path("paradigm"));
  r.finish();
  return f;
}

json findings_to_json(const std::vector<Finding>& findings) {
  json arr = json::array();
  for (const auto& f : findings)
    arr.push_back({{"severity", to_string(f.severity)},
                   {"code", f.code},
                   {"message", f.message},
                   {"subject", f.subject}});
  return arr;
}

json spec_to_json(const ProblemSpec& spec) {
  json objectives = json::array(), variables = json::array(), constraints = json::array(),
       conflicts = json::array();
  for (const auto& o : spec.objectives) objectives.push_back(objective_to_json(o));
  for (const auto& v : spec.variables) variables.push_back(variable_to_json(v));
  for (const auto& c : spec.constraints) constraints.push_back(constraint_to_json(c));
  for (const auto& [a, b] : spec.conflicts) conflicts.push_back({a, b});
  return {{"schema_version", spec.schema_version},
          {"goal", spec.goal ? json(to_string(*spec.goal)) : json(nullptr)},
          {"background", {{"theoretical_relationships", spec.background.theoretical_relationships},
                          {"expert_knowledge", spec.background.expert_knowledge},
                          {"previous_attempts", spec.background.previous_attempts},
                          {"context", spec.background.context}}},
          {"objectives", objectives},
          {"variables", variables},
          {"constraints", constraints},
          {"conflicts", conflicts},
          {"formulation", spec.formulation ? formulation_to_json(*spec.formulation) : json(nullptr)},
          {"cost_model", spec.cost_model},
          {"budget", spec.budget ? cost_to_json(*spec.budget) : json(nullptr)},
          {"responsibilities", people_to_json(spec.responsibilities)},
          {"participants", people_to_json(spec.participants)}};
}

ProblemSpec spec_from_json(const json& doc) {
  ObjectReader r(doc, "");
  ProblemSpec spec;
  const auto version = r.integer("schema_version");
  if (version != kSchemaVersion)
    throw Error(ErrorKind::Version,
                "unsupported schema_version " + std::to_string(version) + " (supported: " +
                    std::to_string(kSchemaVersion) + ")",
                {{"schema_version", version}, {"supported", kSchemaVersion}});
  spec.schema_version = static_cast<int>(version);

  // The key must be present; null is how drafts spell "not yet answered".
  if (!r.has("goal")) json_util::fail("goal", "missing required field");
  if (const json* g = r.optional("goal")) spec.goal = enum_from_json<GoalKind>(*g, "goal");

  {
    ObjectReader b(r.object("background"), "background");
    spec.background = {b.string("theoretical_relationships"), b.string("expert_knowledge"),
                       b.string("previous_attempts"), b.string("context")};
    b.finish();
  }
  const auto& objectives = r.array("objectives");
  for (std::size_t i = 0; i < objectives.size(); ++i)
    spec.objectives.push_back(objective_from_json(objectives[i], "objectives[" + std::to_string(i) + "]"));
  const auto& variables = r.array("variables");
  for (std::size_t i = 0; i < variables.size(); ++i)
    spec.variables.push_back(variable_from_json(variables[i], "variables[" + std::to_string(i) + "]"));
  const auto& constraints = r.array("constraints");
  for (std::size_t i = 0; i < constraints.size(); ++i)
    spec.constraints.push_back(constraint_from_json(constraints[i], "constraints[" + std::to_string(i) + "]"));
  const auto& conflicts = r.array("conflicts");
  for (std::size_t i = 0; i < conflicts.size(); ++i) {
    auto path = "conflicts[" + std::to_string(i) + "]";
    auto pair = names_from_json(conflicts[i], path);
    if (pair.size() != 2) json_util::fail(path, "expected a pair of objective names");
    spec.conflicts.emplace_back(pair[0], pair[1]);
  }
  if (!r.has("formulation")) json_util::fail("formulation", "missing required field");
  if (const json* f = r.optional("formulation")) spec.formulation = formulation_from_json(*f, "formulation");
  spec.cost_model = r.string("cost_model");
  if (!r.has("budget")) json_util::fail("budget", "missing required field");
  if (const json* b = r.optional("budget")) spec.budget = cost_from_json(*b, "budget");
  spec.responsibilities = people_from_json(r.required("responsibilities"), "responsibilities");
  spec.participants = people_from_json(r.required("participants"), "participants");
  r.finish();
  return spec;
}

std::string write_spec(const ProblemSpec& spec) {
  return json_util::canonical_dump(spec_to_json(spec));
}

ProblemSpec parse_spec(std::string_view document) {
  return spec_from_json(json_util::parse_document(document));
}

}  // namespace greybox::model
