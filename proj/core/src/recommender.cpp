#include "greybox/recommender.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "embedded_data.hpp"
#include "greybox/errors.hpp"
#include "greybox/json_util.hpp"

namespace greybox::recommend {

using json_util::ObjectReader;
using nlohmann::json;
using rules::FeatureType;
using rules::FeatureValue;
using rules::Features;

namespace {

struct FamilyName {
  Family family;
  std::string_view name;
  std::string_view label;
};

constexpr FamilyName kFamilies[] = {
    {Family::AnalyticSolution, "analytic_solution", "AnalyticSolution"},
    {Family::GradientBased, "gradient_based", "GradientBased"},
    {Family::QuasiNewton, "quasi_newton", "QuasiNewton"},
    {Family::LinearProgramming, "linear_programming", "LinearProgramming"},
    {Family::QuadraticProgramming, "quadratic_programming", "QuadraticProgramming"},
    {Family::DirectSearchLocal, "direct_search_local", "DirectSearchLocal"},
    {Family::RestartFunnel, "restart_funnel", "RestartFunnel"},
    {Family::GlobalMultistart, "global_multistart", "GlobalMultistart"},
    {Family::ModelBasedSurrogate, "model_based_surrogate", "ModelBasedSurrogate"},
    {Family::NoiseTolerant, "noise_tolerant", "NoiseTolerant"},
    {Family::MultiObjective, "multi_objective", "MultiObjective"},
    {Family::Scalarization, "scalarization", "Scalarization"},
};

std::string_view label(Family f) {
  for (const auto& e : kFamilies)
    if (e.family == f) return e.label;
  return "";
}

}  // namespace

std::string_view to_string(Family f) {
  for (const auto& e : kFamilies)
    if (e.family == f) return e.name;
  return "";
}

std::optional<Family> family_from_string(std::string_view s) {
  for (const auto& e : kFamilies)
    if (e.name == s) return e.family;
  return std::nullopt;
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> all = [] {
    std::vector<Family> v;
    for (const auto& e : kFamilies) v.push_back(e.family);
    return v;
  }();
  return all;
}

const rules::FeatureSchema& feature_schema() {
  static const rules::FeatureSchema schema{
      {"goal", FeatureType::Text},
      {"n_objectives", FeatureType::Number},
      {"n_conflicts", FeatureType::Number},
      {"n_variables", FeatureType::Number},
      {"all_real", FeatureType::Bool},
      {"any_discrete", FeatureType::Bool},
      {"evals_affordable", FeatureType::Number},
      {"has_simulation_constraint", FeatureType::Bool},
      {"has_hidden_constraint", FeatureType::Bool},
      {"analytic", FeatureType::Text},
      {"gradient", FeatureType::Text},
      {"shape", FeatureType::Text},
      {"structure", FeatureType::Text},
      {"deterministic", FeatureType::Text},
  };
  return schema;
}

RuleTable parse_rule_table(std::string_view document) {
  const json doc = json_util::parse_document(document);
  ObjectReader r(doc, "");
  RuleTable table;
  table.version = static_cast<int>(r.integer("version"));

  const auto& priority = r.array("family_priority");
  for (std::size_t i = 0; i < priority.size(); ++i) {
    auto path = "family_priority[" + std::to_string(i) + "]";
    auto name = json_util::as_string(priority[i], path);
    auto f = family_from_string(name);
    if (!f) json_util::fail(path, "unknown family '" + name + "'");
    if (std::find(table.family_priority.begin(), table.family_priority.end(), *f) !=
        table.family_priority.end())
      json_util::fail(path, "family listed twice");
    table.family_priority.push_back(*f);
  }
  if (table.family_priority.size() != all_families().size())
    json_util::fail("family_priority", "must list every family exactly once");

  const auto& rules = r.array("rules");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    ObjectReader rr(rules[i], "rules[" + std::to_string(i) + "]");
    auto id = rr.string("rule_id");
    if (!ids.insert(id).second) json_util::fail(rr.child_path("rule_id"), "duplicate rule id '" + id + "'");
    std::optional<Family> family;
    if (!rr.has("family")) json_util::fail(rr.child_path("family"), "missing required field");
    if (const json* fam = rr.optional("family")) {
      auto name = json_util::as_string(*fam, rr.child_path("family"));
      family = family_from_string(name);
      if (!family) json_util::fail(rr.child_path("family"), "unknown family '" + name + "'");
    }
    auto text = rr.string("predicate");
    auto weight = rr.number("rank_weight");
    auto citation = rr.string("citation");
    rr.finish();
    rules::Predicate pred = [&] {
      try {
        return rules::Predicate::parse(text, feature_schema());
      } catch (const Error& e) {
        throw Error(ErrorKind::RuleSyntax, "rule '" + id + "': " + e.what(),
                    {{"rule_id", id}, {"cause", e.details()}});
      }
    }();
    table.rules.push_back({id, std::move(pred), family, weight, citation});
  }
  r.finish();
  return table;
}

const RuleTable& default_rule_table() {
  static const RuleTable table = parse_rule_table(greybox::detail::default_rules_json());
  return table;
}

Recommendation::Recommendation(Family family, int rank, double score, std::vector<RuleFire> trace)
    : family_(family), rank_(rank), score_(score), trace_(std::move(trace)) {
  if (rank_ < 1) throw Error(ErrorKind::InvalidArgument, "rank must be >= 1");
  if (trace_.empty())
    throw Error(ErrorKind::InvalidArgument,
                "a recommendation needs at least one fired rule in its trace",
                {{"family", to_string(family_)}});
}

std::map<std::string, Features> extract_features(const model::ProblemSpec& spec) {
  const auto& f = spec.formulation;
  if (!f)
    throw Error(ErrorKind::Unfinalized, "the spec has no formulation; finalize the checklist first");

  auto selected = [](const std::vector<std::string>& names, const std::string& n) {
    return std::find(names.begin(), names.end(), n) != names.end();
  };

  Features base;
  base["goal"] = spec.goal ? FeatureValue(std::string(model::to_string(*spec.goal))) : FeatureValue{};
  base["n_objectives"] = static_cast<double>(f->selected_objectives.size());
  double conflicts = 0;
  for (const auto& [a, b] : spec.conflicts)
    if (selected(f->selected_objectives, a) && selected(f->selected_objectives, b)) ++conflicts;
  base["n_conflicts"] = conflicts;
  base["n_variables"] = static_cast<double>(f->selected_variables.size());
  bool all_real = true, any_discrete = false;
  for (const auto& name : f->selected_variables) {
    if (const auto* v = spec.find_variable(name)) {
      all_real = all_real && v->dtype == model::DataType::Real;
      any_discrete = any_discrete || v->dtype != model::DataType::Real;
    }
  }
  base["all_real"] = all_real;
  base["any_discrete"] = any_discrete;
  bool simulation = false, hidden = false;
  for (const auto& name : f->selected_constraints) {
    const auto* c = spec.find_constraint(name);
    if (!c || !c->code) continue;
    simulation = simulation || c->code->is_simulation_based();
    hidden = hidden || c->code->is_hidden();
  }
  base["has_simulation_constraint"] = simulation;
  base["has_hidden_constraint"] = hidden;

  std::map<std::string, Features> out;
  for (const auto& name : f->selected_objectives) {
    const auto* o = spec.find_objective(name);
    Features feats = base;
    if (o) {
      feats["analytic"] = std::string(to_string(o->analytic_form));
      feats["gradient"] = std::string(to_string(o->gradient_available));
      feats["shape"] = std::string(model::to_string(o->shape));
      feats["structure"] = std::string(model::to_string(o->global_structure));
      feats["deterministic"] = std::string(to_string(o->deterministic));
      // Worst case: the smallest budget over the most expensive evaluation.
      if (spec.budget && o->cost && spec.budget->unit == o->cost->unit && o->cost->high > 0)
        feats["evals_affordable"] = spec.budget->low / o->cost->high;
    }
    for (const auto& [key, _] : feature_schema()) feats.try_emplace(key, FeatureValue{});
    out.emplace(name, std::move(feats));
  }
  if (out.empty()) {
    for (const auto& [key, _] : feature_schema()) base.try_emplace(key, FeatureValue{});
    out.emplace("", std::move(base));
  }
  return out;
}

std::vector<Recommendation> recommend(const model::ProblemSpec& spec, const RuleTable& table) {
  const auto features = extract_features(spec);

  struct Score {
    double best = -1;
    std::vector<RuleFire> fires;
  };
  std::map<Family, Score> scores;
  std::vector<RuleFire> notes;
  std::set<std::string> noted;

  for (const auto& rule : table.rules) {
    for (const auto& [objective, feats] : features) {
      if (!rule.predicate.evaluate(feats)) continue;
      RuleFire fire{rule.rule_id, objective, {}, rule.citation};
      for (const auto& name : rule.predicate.referenced())
        fire.matched_features[name] = rules::render(feats.at(name));
      if (rule.family) {
        auto& s = scores[*rule.family];
        s.best = std::max(s.best, rule.rank_weight);
        s.fires.push_back(std::move(fire));
      } else if (noted.insert(rule.rule_id).second) {
        fire.objective.clear();
        notes.push_back(std::move(fire));
      }
    }
  }

  auto priority = [&](Family f) {
    auto it = std::find(table.family_priority.begin(), table.family_priority.end(), f);
    return it - table.family_priority.begin();
  };
  std::vector<std::pair<Family, Score>> ranked(scores.begin(), scores.end());
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.second.best != b.second.best) return a.second.best > b.second.best;
    return priority(a.first) < priority(b.first);
  });

  std::vector<Recommendation> out;
  int rank = 1;
  for (auto& [family, score] : ranked) {
    auto trace = std::move(score.fires);
    trace.insert(trace.end(), notes.begin(), notes.end());
    out.emplace_back(family, rank++, score.best, std::move(trace));
  }
  return out;
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string fire_line(const RuleFire& fire) {
  std::string line = "`" + fire.rule_id + "`";
  if (!fire.objective.empty()) line += " for objective " + fire.objective;
  std::string matched;
  for (const auto& [k, v] : fire.matched_features) matched += (matched.empty() ? "" : ", ") + k + "=" + v;
  if (!matched.empty()) line += " (" + matched + ")";
  return line + ": " + fire.citation;
}

}  // namespace

std::string explain(const Recommendation& rec) {
  std::string out = std::string(label(rec.family())) + " (rank " + std::to_string(rec.rank()) +
                    ", score " + format_number(rec.score()) + ")\n";
  for (const auto& fire : rec.trace()) out += "  - " + fire_line(fire) + "\n";
  return out;
}

std::string render_markdown(const std::vector<Recommendation>& recs) {
  std::string out = "| rank | family | score | rules |\n|---:|---|---:|---|\n";
  for (const auto& rec : recs) {
    std::string ids;
    for (const auto& fire : rec.trace()) ids += (ids.empty() ? "" : ", ") + fire.rule_id;
    out += "| " + std::to_string(rec.rank()) + " | " + std::string(label(rec.family())) + " | " +
           format_number(rec.score()) + " | " + ids + " |\n";
  }
  out += "\n## Trace\n\n";
  for (const auto& rec : recs) {
    out += "### " + std::to_string(rec.rank()) + ". " + std::string(label(rec.family())) + "\n\n";
    for (const auto& fire : rec.trace()) out += "- " + fire_line(fire) + "\n";
    out += "\n";
  }
  return out;
}

json to_json(const std::vector<Recommendation>& recs) {
  json arr = json::array();
  for (const auto& rec : recs) {
    json trace = json::array();
    for (const auto& fire : rec.trace())
      trace.push_back({{"rule_id", fire.rule_id},
                       {"objective", fire.objective},
                       {"matched_features", fire.matched_features},
                       {"citation", fire.citation}});
    arr.push_back({{"family", to_string(rec.family())},
                   {"rank", rec.rank()},
                   {"score", rec.score()},
                   {"trace", trace}});
  }
  return {{"recommendations", arr}};
}

}  // namespace greybox::recommend
