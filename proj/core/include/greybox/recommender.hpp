#pragma once

// Rule-table driven recommendation of algorithm families for a finalized
// ProblemSpec. Every recommendation carries the rules that produced it.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "greybox/problem_model.hpp"
#include "greybox/rule_expr.hpp"

namespace greybox::recommend {

enum class Family {
  AnalyticSolution,
  GradientBased,
  QuasiNewton,
  LinearProgramming,
  QuadraticProgramming,
  DirectSearchLocal,
  RestartFunnel,
  GlobalMultistart,
  ModelBasedSurrogate,
  NoiseTolerant,
  MultiObjective,
  Scalarization,
};

std::string_view to_string(Family f);
std::optional<Family> family_from_string(std::string_view s);
const std::vector<Family>& all_families();

/// Evaluations the budget must afford before surrogates stop being indicated.
inline constexpr double kExpensiveThreshold = 1000.0;

struct Rule {
  std::string rule_id;
  rules::Predicate predicate;
  /// Empty for note rules, which only annotate the trace.
  std::optional<Family> family;
  double rank_weight = 0.0;
  std::string citation;
};

struct RuleTable {
  int version = 1;
  /// Tie-break order: earlier families win equal scores.
  std::vector<Family> family_priority;
  std::vector<Rule> rules;
};

/// Names and types of the features predicates may use.
const rules::FeatureSchema& feature_schema();

/// Throws Error{Parse} for structural problems, Error{RuleSyntax} for
/// predicates that do not parse or type-check.
RuleTable parse_rule_table(std::string_view document);
const RuleTable& default_rule_table();

struct RuleFire {
  std::string rule_id;
  /// Objective the rule was evaluated for; empty for spec-level evaluation.
  std::string objective;
  /// Referenced feature -> value it had.
  std::map<std::string, std::string> matched_features;
  std::string citation;

  friend bool operator==(const RuleFire&, const RuleFire&) = default;
};

class Recommendation {
 public:
  /// Throws Error{InvalidArgument} for rank < 1 or an empty trace.
  Recommendation(Family family, int rank, double score, std::vector<RuleFire> trace);

  Family family() const noexcept { return family_; }
  int rank() const noexcept { return rank_; }
  double score() const noexcept { return score_; }
  const std::vector<RuleFire>& trace() const noexcept { return trace_; }

  friend bool operator==(const Recommendation&, const Recommendation&) = default;

 private:
  Family family_;
  int rank_;
  double score_;
  std::vector<RuleFire> trace_;
};

/// Feature vectors the rules are evaluated on: one per selected objective
/// (keyed by objective name), each merged with the spec-level features.
std::map<std::string, rules::Features> extract_features(const model::ProblemSpec& spec);

/// Ranked families, rank 1 first. Throws Error{Unfinalized} without a
/// formulation.
std::vector<Recommendation> recommend(const model::ProblemSpec& spec,
                                      const RuleTable& table = default_rule_table());

/// Human-readable rationale: one line per fired rule with its citation.
std::string explain(const Recommendation& rec);

/// Markdown table plus the trace of every recommendation.
std::string render_markdown(const std::vector<Recommendation>& recs);
nlohmann::json to_json(const std::vector<Recommendation>& recs);

}  // namespace greybox::recommend
