#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "greybox/errors.hpp"
#include "greybox/problem_model.hpp"
#include "greybox/spec_io.hpp"
#include "test_support.hpp"

namespace greybox {
namespace {

using model::Finding;
using model::ProblemSpec;
using model::Severity;

ProblemSpec bounded_single_objective() {
  ProblemSpec s;
  s.goal = model::GoalKind::FindBest;
  model::Objective f;
  f.name = "f";
  f.domain_vars = {"x"};
  s.objectives = {f};
  model::DecisionVariable x;
  x.name = "x";
  x.lower = -5.0;
  x.upper = 5.0;
  s.variables = {x};
  s.formulation = model::Formulation{{"f"}, {"x"}, {}, model::Paradigm::SingleObjective};
  s.cost_model = "wall clock";
  s.responsibilities = {{"ann", "implementation"}};
  return s;
}

bool has_finding(const std::vector<Finding>& fs, Severity sev, const std::string& code,
                 const std::string& subject) {
  return std::any_of(fs.begin(), fs.end(), [&](const Finding& f) {
    return f.severity == sev && f.code == code && f.subject == subject;
  });
}

TEST(ValidateSpec, FullySpecifiedSpecIsClean) {
  EXPECT_TRUE(model::validate_spec(bounded_single_objective()).empty());
}

TEST(ValidateSpec, MissingBoundsWarn) {
  auto s = bounded_single_objective();
  s.variables[0].lower.reset();
  s.variables[0].upper.reset();
  s.formulation->selected_variables.clear();
  model::DecisionVariable y;
  y.name = "y";
  y.lower = 0;
  y.upper = 1;
  s.variables.push_back(y);
  s.formulation->selected_variables = {"y"};
  const auto fs = model::validate_spec(s);
  ASSERT_EQ(fs.size(), 1u) << model::findings_to_json(fs).dump();
  EXPECT_TRUE(has_finding(fs, Severity::Warning, "NO_BOUNDS", "x"));
}

TEST(ValidateSpec, SelectedRealVariableNeedsBounds) {
  auto s = bounded_single_objective();
  s.variables[0].upper.reset();
  const auto fs = model::validate_spec(s);
  EXPECT_TRUE(has_finding(fs, Severity::Warning, "NO_BOUNDS", "x"));
  EXPECT_TRUE(has_finding(fs, Severity::Error, "SELECTED_UNBOUNDED", "x"));
}

TEST(ValidateSpec, DanglingFormulationReference) {
  auto s = bounded_single_objective();
  model::Objective f2;
  f2.name = "f2";
  s.objectives.push_back(f2);
  s.formulation->selected_objectives = {"f3"};
  const auto fs = model::validate_spec(s);
  EXPECT_TRUE(has_finding(fs, Severity::Error, "DANGLING_REF", "formulation"));
  EXPECT_TRUE(model::has_errors(fs));
}

TEST(ValidateSpec, SeparableWithoutPartsWarns) {
  auto s = bounded_single_objective();
  s.objectives[0].additively_separable = Ternary::Yes;
  EXPECT_TRUE(has_finding(model::validate_spec(s), Severity::Warning, "SEPARABLE_UNPARTITIONED", "f"));
}

TEST(ValidateSpec, UnexaminedConflictsAreInfo) {
  auto s = bounded_single_objective();
  model::Objective g;
  g.name = "g";
  s.objectives.push_back(g);
  s.formulation->selected_objectives = {"f", "g"};
  const auto fs = model::validate_spec(s);
  EXPECT_TRUE(has_finding(fs, Severity::Info, "CONFLICTS_UNEXAMINED", "conflicts"));
  s.conflicts = {{"f", "g"}};
  EXPECT_FALSE(has_finding(model::validate_spec(s), Severity::Info, "CONFLICTS_UNEXAMINED", "conflicts"));
}

TEST(ValidateSpec, BoundsAndLogTransform) {
  auto s = bounded_single_objective();
  s.variables[0].transform.kind = model::Transform::Kind::Log;
  EXPECT_TRUE(has_finding(model::validate_spec(s), Severity::Error, "LOG_NONPOSITIVE", "x"));
  s.variables[0].transform.kind = model::Transform::Kind::None;
  s.variables[0].lower = 5.0;
  EXPECT_TRUE(has_finding(model::validate_spec(s), Severity::Error, "BAD_BOUNDS", "x"));
}

TEST(ValidateSpec, DuplicateNamesAndCyclicParts) {
  auto s = bounded_single_objective();
  s.variables.push_back(s.variables[0]);
  EXPECT_TRUE(has_finding(model::validate_spec(s), Severity::Error, "DUPLICATE_NAME", "x"));

  auto t = bounded_single_objective();
  model::Objective inner;
  inner.name = "f";
  t.objectives[0].parts = {inner};
  EXPECT_TRUE(has_finding(model::validate_spec(t), Severity::Error, "CYCLIC_PARTS", "f"));
}

TEST(ValidateSpec, HiddenConstraintMustBeNush) {
  auto s = bounded_single_objective();
  model::ConstraintSpec c;
  c.name = "crash";
  c.known = false;
  c.a_priori = c.relaxable = c.quantifiable = Ternary::No;
  c.code = qrak::QrakCode::parse("NUSK");
  s.constraints = {c};
  EXPECT_TRUE(has_finding(model::validate_spec(s), Severity::Error, "HIDDEN_NOT_NUSH", "crash"));
  s.constraints[0].code = qrak::QrakCode::hidden();
  EXPECT_TRUE(model::validate_spec(s).empty());
}

TEST(ValidateSpec, MissingGoalIsError) {
  auto s = bounded_single_objective();
  s.goal.reset();
  EXPECT_TRUE(has_finding(model::validate_spec(s), Severity::Error, "MISSING_GOAL", "goal"));
}

TEST(ValidateSpec, OrderedBySubjectThenCode) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto s = testing::random_valid_spec(rng);
    s.variables[0].lower.reset();
    s.formulation->selected_objectives.push_back("ghost");
    const auto fs = model::validate_spec(s);
    EXPECT_TRUE(std::is_sorted(fs.begin(), fs.end(), [](const Finding& a, const Finding& b) {
      return std::tie(a.subject, a.code) < std::tie(b.subject, b.code);
    }));
    EXPECT_EQ(fs, model::validate_spec(s));
  }
}

TEST(ConflictCandidates, Examples) {
  ProblemSpec s;
  for (auto n : {"f", "g", "h"}) {
    model::Objective o;
    o.name = n;
    s.objectives.push_back(o);
  }
  s.conflicts = {{"f", "g"}};
  EXPECT_EQ(model::conflict_candidates(s),
            (std::vector<model::ObjectivePair>{{"f", "h"}, {"g", "h"}}));

  s.objectives.pop_back();
  s.conflicts.clear();
  EXPECT_EQ(model::conflict_candidates(s), (std::vector<model::ObjectivePair>{{"f", "g"}}));

  s.objectives.pop_back();
  try {
    model::conflict_candidates(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyObjectives);
  }
}

TEST(ConflictCandidates, UnionWithDeclaredIsCompletePairSet) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    ProblemSpec s;
    const int n = 2 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      model::Objective o;
      o.name = "o" + std::to_string(i);
      s.objectives.push_back(o);
    }
    std::set<model::ObjectivePair> all;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        all.insert({s.objectives[i].name, s.objectives[j].name});
        if (rng() % 3 == 0) {
          // Declared pairs may come in either order.
          if (rng() % 2)
            s.conflicts.push_back({s.objectives[i].name, s.objectives[j].name});
          else
            s.conflicts.push_back({s.objectives[j].name, s.objectives[i].name});
        }
      }
    const auto cand = model::conflict_candidates(s);
    EXPECT_TRUE(std::is_sorted(cand.begin(), cand.end()));
    std::set<model::ObjectivePair> got(cand.begin(), cand.end());
    for (auto [a, b] : s.conflicts) {
      if (b < a) std::swap(a, b);
      EXPECT_FALSE(got.count({a, b}));
      got.insert({a, b});
    }
    EXPECT_EQ(got, all);
  }
}

TEST(SpecIo, RoundTripRandomSpecs) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const auto s = testing::random_valid_spec(rng);
    const auto doc = model::write_spec(s);
    const auto back = model::parse_spec(doc);
    ASSERT_EQ(back, s) << doc;
    EXPECT_EQ(model::write_spec(back), doc);
  }
}

TEST(SpecIo, GeneratedSpecsLintClean) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto s = testing::random_valid_spec(rng);
    const auto fs = model::validate_spec(s);
    EXPECT_FALSE(model::has_errors(fs)) << model::findings_to_json(fs).dump();
  }
}

TEST(SpecIo, CanonicalDocumentIsFixedPoint) {
  const auto doc = model::write_spec(bounded_single_objective());
  EXPECT_EQ(doc.back(), '\n');
  EXPECT_EQ(model::write_spec(model::parse_spec(doc)), doc);
  auto j = nlohmann::json::parse(doc);
  EXPECT_EQ(j.at("schema_version"), 1);
}

TEST(SpecIo, MissingGoalNamesField) {
  auto j = model::spec_to_json(bounded_single_objective());
  j.erase("goal");
  try {
    model::parse_spec(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_EQ(e.details().at("field"), "goal");
  }
}

TEST(SpecIo, UnsupportedVersion) {
  auto j = model::spec_to_json(bounded_single_objective());
  j["schema_version"] = 999;
  try {
    model::parse_spec(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Version);
  }
}

TEST(SpecIo, UnknownFieldRejected) {
  auto j = model::spec_to_json(bounded_single_objective());
  j["objectives"][0]["colour"] = "blue";
  try {
    model::parse_spec(j.dump());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("colour"), std::string::npos);
  }
}

TEST(SpecIo, SyntaxErrorIsParseError) {
  try {
    model::parse_spec("{\"schema_version\": 1,");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

TEST(SpecIo, StatedCodeMustMatchFlags) {
  auto s = bounded_single_objective();
  model::ConstraintSpec c;
  c.name = "g1";
  c.a_priori = c.relaxable = c.quantifiable = Ternary::Yes;
  c.code = qrak::QrakCode::parse("QRAK");
  s.constraints = {c};
  auto j = model::spec_to_json(s);
  EXPECT_EQ(model::parse_spec(j.dump()), s);
  j["constraints"][0]["code"] = "NRAK";
  EXPECT_THROW(model::parse_spec(j.dump()), Error);
}

TEST(SpecIo, DefaultValuesKeepTheirType) {
  auto s = bounded_single_objective();
  for (model::Value v : {model::Value{true}, model::Value{std::int64_t{3}}, model::Value{3.0},
                         model::Value{std::string("3")}}) {
    s.variables[0].default_value = v;
    EXPECT_EQ(model::parse_spec(model::write_spec(s)).variables[0].default_value, v);
  }
}

TEST(Identifiers, Rules) {
  EXPECT_TRUE(model::is_identifier("x1"));
  EXPECT_TRUE(model::is_identifier("max_temp"));
  EXPECT_FALSE(model::is_identifier(""));
  EXPECT_FALSE(model::is_identifier("a.b"));
  EXPECT_FALSE(model::is_identifier("a:b"));
  EXPECT_FALSE(model::is_identifier("a b"));
}

}  // namespace
}  // namespace greybox
