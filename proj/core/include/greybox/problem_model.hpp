#pragma once

// Structured description of an optimization problem as elicited by the
// intake checklist, plus lint rules over it.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "greybox/qrak.hpp"
#include "greybox/ternary.hpp"

namespace greybox::model {

inline constexpr int kSchemaVersion = 1;

/// Identifiers name objectives, variables, constraints and people. They are
/// also used as path segments in checklist instance ids, so '.', ':' and
/// whitespace are not allowed.
bool is_identifier(std::string_view s);

enum class GoalKind {
  FindFeasible,
  FindRobust,
  FindBest,
  DetectLocalOptima,
  ApproximateLevelSet,
  ApproximateParetoSet,
  ApproximateParetoFront,
  Interactive,
};

enum class Shape { Linear, Quadratic, Convex, Multimodal, Unknown };
enum class GlobalStructure { Funnel, Symmetric, None, Unknown };
enum class DataType { Real, Integer, Categorical, Binary };
enum class Influence { High, Medium, Low, Unknown };
enum class Paradigm { SingleObjective, MultiObjective, Scalarized, ConstraintSatisfaction };
enum class CostKind { Constant, Range, Distribution };

struct CostEstimate {
  CostKind kind = CostKind::Constant;
  /// Only meaningful for CostKind::Distribution (e.g. "lognormal").
  std::string distribution;
  double low = 0.0;
  double high = 0.0;
  std::string unit = "s";

  friend bool operator==(const CostEstimate&, const CostEstimate&) = default;
};

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct Objective {
  std::string name;
  /// Decomposition into terms of different meaning; questions attach to leaves.
  std::vector<Objective> parts;
  Ternary additively_separable = Ternary::Unknown;
  Ternary analytic_form = Ternary::Unknown;
  Ternary gradient_available = Ternary::Unknown;
  Shape shape = Shape::Unknown;
  GlobalStructure global_structure = GlobalStructure::Unknown;
  Ternary deterministic = Ternary::Unknown;
  std::vector<std::string> domain_vars;
  std::optional<Bounds> image_bounds;
  std::optional<CostEstimate> cost;

  friend bool operator==(const Objective&, const Objective&) = default;
};

struct Transform {
  enum class Kind { None, Log, Sqrt, Custom };
  Kind kind = Kind::None;
  std::string label;  // Custom only

  friend bool operator==(const Transform&, const Transform&) = default;
};

/// Default values keep the JSON type they were written with.
using Value = std::variant<bool, std::int64_t, double, std::string>;

struct DecisionVariable {
  std::string name;
  DataType dtype = DataType::Real;
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<Value> default_value;
  /// objective name -> expected influence
  std::map<std::string, Influence> influence;
  Transform transform;

  friend bool operator==(const DecisionVariable&, const DecisionVariable&) = default;
};

struct ConstraintSpec {
  std::string name;
  bool known = true;
  Ternary a_priori = Ternary::Unknown;
  Ternary relaxable = Ternary::Unknown;
  Ternary quantifiable = Ternary::Unknown;
  std::optional<CostEstimate> cost;
  /// Derived via qrak::try_classify; empty while a known constraint still has
  /// unknown answers.
  std::optional<qrak::QrakCode> code;

  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

struct Formulation {
  std::vector<std::string> selected_objectives;
  std::vector<std::string> selected_variables;
  std::vector<std::string> selected_constraints;
  Paradigm paradigm = Paradigm::SingleObjective;

  friend bool operator==(const Formulation&, const Formulation&) = default;
};

/// Checklist item 3, kept as structured free text.
struct Background {
  std::string theoretical_relationships;
  std::string expert_knowledge;
  std::string previous_attempts;
  std::string context;

  friend bool operator==(const Background&, const Background&) = default;
};

struct PersonRole {
  std::string person;
  std::string role;
  friend bool operator==(const PersonRole&, const PersonRole&) = default;
};

using ObjectivePair = std::pair<std::string, std::string>;

struct ProblemSpec {
  int schema_version = kSchemaVersion;
  /// Empty only in checklist drafts; validate_spec reports MISSING_GOAL.
  std::optional<GoalKind> goal;
  Background background;
  std::vector<Objective> objectives;
  std::vector<DecisionVariable> variables;
  std::vector<ConstraintSpec> constraints;
  std::vector<ObjectivePair> conflicts;
  std::optional<Formulation> formulation;
  std::string cost_model;
  std::optional<CostEstimate> budget;
  std::vector<PersonRole> responsibilities;
  std::vector<PersonRole> participants;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;

  const Objective* find_objective(std::string_view name) const;
  const DecisionVariable* find_variable(std::string_view name) const;
  const ConstraintSpec* find_constraint(std::string_view name) const;
};

// --- lint -----------------------------------------------------------------

enum class Severity { Error, Warning, Info };

struct Finding {
  Severity severity;
  std::string code;
  std::string message;
  std::string subject;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// All lint findings sorted by (subject, code). Never throws.
std::vector<Finding> validate_spec(const ProblemSpec& spec);

bool has_errors(const std::vector<Finding>& findings);

/// Unordered pairs of top-level objectives not yet listed in spec.conflicts,
/// each pair ordered (a < b) and the list sorted. Throws EmptyObjectives when
/// fewer than two objectives are declared.
std::vector<ObjectivePair> conflict_candidates(const ProblemSpec& spec);

// --- enum names used by every file format ---------------------------------

std::string_view to_string(GoalKind);
std::string_view to_string(Shape);
std::string_view to_string(GlobalStructure);
std::string_view to_string(DataType);
std::string_view to_string(Influence);
std::string_view to_string(Paradigm);
std::string_view to_string(CostKind);
std::string_view to_string(Severity);

std::optional<GoalKind> goal_from_string(std::string_view);
std::optional<Shape> shape_from_string(std::string_view);
std::optional<GlobalStructure> structure_from_string(std::string_view);
std::optional<DataType> dtype_from_string(std::string_view);
std::optional<Influence> influence_from_string(std::string_view);
std::optional<Paradigm> paradigm_from_string(std::string_view);
std::optional<CostKind> cost_kind_from_string(std::string_view);

std::vector<std::string_view> all_goal_names();

}  // namespace greybox::model
