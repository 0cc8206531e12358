#include "greybox/problem_model.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <tuple>

#include "greybox/errors.hpp"

namespace greybox::model {

bool is_identifier(std::string_view s) {
  if (s.empty() || s.size() > 128) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-';
  });
}

namespace {

template <typename Enum, std::size_t N>
using NameTable = std::array<std::pair<Enum, std::string_view>, N>;

constexpr NameTable<GoalKind, 8> kGoalNames{{
    {GoalKind::FindFeasible, "find_feasible"},
    {GoalKind::FindRobust, "find_robust"},
    {GoalKind::FindBest, "find_best"},
    {GoalKind::DetectLocalOptima, "detect_local_optima"},
    {GoalKind::ApproximateLevelSet, "approximate_level_set"},
    {GoalKind::ApproximateParetoSet, "approximate_pareto_set"},
    {GoalKind::ApproximateParetoFront, "approximate_pareto_front"},
    {GoalKind::Interactive, "interactive"},
}};
constexpr NameTable<Shape, 5> kShapeNames{{
    {Shape::Linear, "linear"},
    {Shape::Quadratic, "quadratic"},
    {Shape::Convex, "convex"},
    {Shape::Multimodal, "multimodal"},
    {Shape::Unknown, "unknown"},
}};
constexpr NameTable<GlobalStructure, 4> kStructureNames{{
    {GlobalStructure::Funnel, "funnel"},
    {GlobalStructure::Symmetric, "symmetric"},
    {GlobalStructure::None, "none"},
    {GlobalStructure::Unknown, "unknown"},
}};
constexpr NameTable<DataType, 4> kTypeNames{{
    {DataType::Real, "real"},
    {DataType::Integer, "integer"},
    {DataType::Categorical, "categorical"},
    {DataType::Binary, "binary"},
}};
constexpr NameTable<Influence, 4> kInfluenceNames{{
    {Influence::High, "high"},
    {Influence::Medium, "medium"},
    {Influence::Low, "low"},
    {Influence::Unknown, "unknown"},
}};
constexpr NameTable<Paradigm, 4> kParadigmNames{{
    {Paradigm::SingleObjective, "single_objective"},
    {Paradigm::MultiObjective, "multi_objective"},
    {Paradigm::Scalarized, "scalarized"},
    {Paradigm::ConstraintSatisfaction, "constraint_satisfaction"},
}};
constexpr NameTable<CostKind, 3> kCostNames{{
    {CostKind::Constant, "constant"},
    {CostKind::Range, "range"},
    {CostKind::Distribution, "distribution"},
}};

template <typename Enum, std::size_t N>
std::string_view name_of(const NameTable<Enum, N>& table, Enum e) {
  for (const auto& [value, name] : table)
    if (value == e) return name;
  return "";
}

template <typename Enum, std::size_t N>
std::optional<Enum> value_of(const NameTable<Enum, N>& table, std::string_view s) {
  for (const auto& [value, name] : table)
    if (name == s) return value;
  return std::nullopt;
}

}  // namespace

std::string_view to_string(GoalKind e) { return name_of(kGoalNames, e); }
std::string_view to_string(Shape e) { return name_of(kShapeNames, e); }
std::string_view to_string(GlobalStructure e) { return name_of(kStructureNames, e); }
std::string_view to_string(DataType e) { return name_of(kTypeNames, e); }
std::string_view to_string(Influence e) { return name_of(kInfluenceNames, e); }
std::string_view to_string(Paradigm e) { return name_of(kParadigmNames, e); }
std::string_view to_string(CostKind e) { return name_of(kCostNames, e); }
std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Info: return "info";
  }
  return "";
}

std::optional<GoalKind> goal_from_string(std::string_view s) { return value_of(kGoalNames, s); }
std::optional<Shape> shape_from_string(std::string_view s) { return value_of(kShapeNames, s); }
std::optional<GlobalStructure> structure_from_string(std::string_view s) {
  return value_of(kStructureNames, s);
}
std::optional<DataType> dtype_from_string(std::string_view s) { return value_of(kTypeNames, s); }
std::optional<Influence> influence_from_string(std::string_view s) {
  return value_of(kInfluenceNames, s);
}
std::optional<Paradigm> paradigm_from_string(std::string_view s) {
  return value_of(kParadigmNames, s);
}
std::optional<CostKind> cost_kind_from_string(std::string_view s) {
  return value_of(kCostNames, s);
}

std::vector<std::string_view> all_goal_names() {
  std::vector<std::string_view> out;
  for (const auto& [_, name] : kGoalNames) out.push_back(name);
  return out;
}

const Objective* ProblemSpec::find_objective(std::string_view name) const {
  for (const auto& o : objectives)
    if (o.name == name) return &o;
  return nullptr;
}
const DecisionVariable* ProblemSpec::find_variable(std::string_view name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}
const ConstraintSpec* ProblemSpec::find_constraint(std::string_view name) const {
  for (const auto& c : constraints)
    if (c.name == name) return &c;
  return nullptr;
}

// --- lint -----------------------------------------------------------------

namespace {

class Linter {
 public:
  explicit Linter(const ProblemSpec& spec) : spec_(spec) {}

  std::vector<Finding> run() {
    check_goal();
    check_unique_names();
    for (const auto& o : spec_.objectives) check_objective(o, {});
    for (const auto& v : spec_.variables) check_variable(v);
    for (const auto& c : spec_.constraints) check_constraint(c);
    check_conflicts();
    check_formulation();
    if (spec_.budget) check_cost(*spec_.budget, "budget");

    std::stable_sort(findings_.begin(), findings_.end(), [](const Finding& a, const Finding& b) {
      return std::tie(a.subject, a.code) < std::tie(b.subject, b.code);
    });
    return std::move(findings_);
  }

 private:
  void add(Severity sev, std::string code, std::string subject, std::string message) {
    findings_.push_back({sev, std::move(code), std::move(message), std::move(subject)});
  }

  void check_identifier(const std::string& name, const std::string& what) {
    if (!is_identifier(name))
      add(Severity::Error, "BAD_IDENTIFIER", name,
          what + " name '" + name + "' must use letters, digits, '_' or '-'");
  }

  void check_goal() {
    if (!spec_.goal) add(Severity::Error, "MISSING_GOAL", "goal", "no optimization goal stated");
  }

  template <typename Range, typename Key>
  void unique(const Range& items, Key key, const char* what) {
    std::set<std::string> seen;
    for (const auto& item : items) {
      const std::string& name = key(item);
      if (!seen.insert(name).second)
        add(Severity::Error, "DUPLICATE_NAME", name, std::string(what) + " '" + name +
                                                         "' declared more than once");
    }
  }

  void collect_objective_names(const Objective& o, std::set<std::string>& names) {
    names.insert(o.name);
    for (const auto& p : o.parts) collect_objective_names(p, names);
  }

  void check_unique_names() {
    unique(spec_.objectives, [](const Objective& o) -> const std::string& { return o.name; },
           "objective");
    unique(spec_.variables, [](const DecisionVariable& v) -> const std::string& { return v.name; },
           "variable");
    unique(spec_.constraints, [](const ConstraintSpec& c) -> const std::string& { return c.name; },
           "constraint");
    for (const auto& o : spec_.objectives) collect_objective_names(o, objective_names_);
  }

  void check_objective(const Objective& o, std::vector<std::string> ancestors) {
    check_identifier(o.name, "objective");
    if (std::find(ancestors.begin(), ancestors.end(), o.name) != ancestors.end()) {
      add(Severity::Error, "CYCLIC_PARTS", o.name,
          "objective '" + o.name + "' contains itself through its parts");
      return;
    }
    unique(o.parts, [](const Objective& p) -> const std::string& { return p.name; },
           "objective part");
    if (o.additively_separable == Ternary::Yes && o.parts.size() < 2)
      add(Severity::Warning, "SEPARABLE_UNPARTITIONED", o.name,
          "objective is marked additively separable but has fewer than two parts");
    for (const auto& v : o.domain_vars)
      if (!spec_.find_variable(v))
        add(Severity::Error, "DANGLING_REF", o.name,
            "domain variable '" + v + "' is not a declared decision variable");
    if (o.image_bounds && o.image_bounds->lower > o.image_bounds->upper)
      add(Severity::Error, "BAD_IMAGE_BOUNDS", o.name, "image lower bound exceeds upper bound");
    if (o.cost) check_cost(*o.cost, o.name);
    ancestors.push_back(o.name);
    for (const auto& p : o.parts) check_objective(p, ancestors);
  }

  void check_variable(const DecisionVariable& v) {
    check_identifier(v.name, "variable");
    const bool ordered = v.dtype == DataType::Real || v.dtype == DataType::Integer;
    if (ordered && (!v.lower || !v.upper)) {
      std::string which = !v.lower && !v.upper ? "lower and upper bounds" : !v.lower ? "lower bound" : "upper bound";
      add(Severity::Warning, "NO_BOUNDS", v.name, "variable has no " + which);
    }
    if (v.lower && v.upper && !(*v.lower < *v.upper))
      add(Severity::Error, "BAD_BOUNDS", v.name, "lower bound must be strictly below upper bound");
    if (v.transform.kind == Transform::Kind::Log && v.lower && !(*v.lower > 0.0))
      add(Severity::Error, "LOG_NONPOSITIVE", v.name,
          "log transform requires a positive lower bound");
    for (const auto& [objective, _] : v.influence)
      if (objective_names_.count(objective) == 0)
        add(Severity::Error, "DANGLING_REF", v.name,
            "influence refers to undeclared objective '" + objective + "'");
  }

  void check_constraint(const ConstraintSpec& c) {
    check_identifier(c.name, "constraint");
    if (!c.known && (c.a_priori != Ternary::No || c.relaxable != Ternary::No ||
                     c.quantifiable != Ternary::No || (c.code && !c.code->is_hidden())))
      add(Severity::Error, "HIDDEN_NOT_NUSH", c.name,
          "a hidden constraint must answer a_priori, relaxable and quantifiable with 'no' and be coded NUSH");
    else if (c.code && c.code != qrak::try_classify(c.known, c.a_priori, c.relaxable, c.quantifiable))
      add(Severity::Error, "CODE_MISMATCH", c.name, "QRAK code " + c.code->rendered() + " contradicts the answers");
    if (!c.code)
      add(Severity::Warning, "UNCLASSIFIED", c.name,
          "constraint has unanswered QRAK questions and no code");
    if (c.cost) check_cost(*c.cost, c.name);
  }

  void check_cost(const CostEstimate& cost, const std::string& subject) {
    if (cost.low < 0.0 || cost.low > cost.high)
      add(Severity::Error, "BAD_COST", subject, "cost estimate needs 0 <= low <= high");
  }

  void check_conflicts() {
    for (const auto& [a, b] : spec_.conflicts) {
      if (!spec_.find_objective(a) || !spec_.find_objective(b))
        add(Severity::Error, "DANGLING_REF", "conflicts",
            "conflict (" + a + ", " + b + ") names an undeclared objective");
      else if (a == b)
        add(Severity::Error, "SELF_CONFLICT", "conflicts",
            "objective '" + a + "' listed as conflicting with itself");
    }
  }

  void check_formulation() {
    if (!spec_.formulation) {
      add(Severity::Warning, "NO_FORMULATION", "formulation", "no problem formulation decided");
      return;
    }
    const auto& f = *spec_.formulation;
    if (f.selected_objectives.empty())
      add(Severity::Error, "EMPTY_SELECTION", "formulation", "no objective selected");
    if (f.selected_variables.empty())
      add(Severity::Error, "EMPTY_SELECTION", "formulation", "no decision variable selected");
    for (const auto& o : f.selected_objectives)
      if (!spec_.find_objective(o))
        add(Severity::Error, "DANGLING_REF", "formulation",
            "selected objective '" + o + "' is not declared");
    for (const auto& c : f.selected_constraints)
      if (!spec_.find_constraint(c))
        add(Severity::Error, "DANGLING_REF", "formulation",
            "selected constraint '" + c + "' is not declared");
    for (const auto& name : f.selected_variables) {
      const auto* v = spec_.find_variable(name);
      if (!v) {
        add(Severity::Error, "DANGLING_REF", "formulation",
            "selected variable '" + name + "' is not declared");
      } else if (v->dtype == DataType::Real && (!v->lower || !v->upper)) {
        // Normalizing to the unit hypercube needs a box.
        add(Severity::Error, "SELECTED_UNBOUNDED", name,
            "selected real variable needs both bounds");
      }
    }
    if (f.selected_objectives.size() > 1 && spec_.conflicts.empty())
      add(Severity::Info, "CONFLICTS_UNEXAMINED", "conflicts",
          "several objectives selected but no conflicting pairs recorded");
  }

  const ProblemSpec& spec_;
  std::set<std::string> objective_names_;
  std::vector<Finding> findings_;
};

}  // namespace

std::vector<Finding> validate_spec(const ProblemSpec& spec) { return Linter(spec).run(); }

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::Error; });
}

std::vector<ObjectivePair> conflict_candidates(const ProblemSpec& spec) {
  if (spec.objectives.size() < 2)
    throw Error(ErrorKind::EmptyObjectives,
                "conflict candidates need at least two declared objectives",
                {{"declared", spec.objectives.size()}});
  std::set<ObjectivePair> declared;
  for (auto [a, b] : spec.conflicts) {
    if (b < a) std::swap(a, b);
    declared.emplace(a, b);
  }
  std::vector<std::string> names;
  for (const auto& o : spec.objectives) names.push_back(o.name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  std::vector<ObjectivePair> out;
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      if (!declared.count({names[i], names[j]})) out.emplace_back(names[i], names[j]);
  return out;
}

}  // namespace greybox::model
