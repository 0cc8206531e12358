#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "greybox/errors.hpp"
#include "greybox/recommender.hpp"
#include "greybox/rule_expr.hpp"
#include "greybox/spec_io.hpp"
#include "test_support.hpp"

namespace greybox {
namespace {

using recommend::Family;
using rules::FeatureType;
using rules::Predicate;

model::ProblemSpec load_spec(const std::string& name) {
  return model::parse_spec(testing::fixture("specs/" + name + ".json"));
}

std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(testing::fixture_path("specs")))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

const rules::FeatureSchema kSchema = {
    {"shape", FeatureType::Text}, {"n", FeatureType::Number}, {"real", FeatureType::Bool}};

TEST(Predicate, Grammar) {
  rules::Features f{{"shape", std::string("convex")}, {"n", 3.0}, {"real", true}};
  auto eval = [&](const char* text) { return Predicate::parse(text, kSchema).evaluate(f); };
  EXPECT_TRUE(eval("shape == 'convex'"));
  EXPECT_FALSE(eval("shape != 'convex'"));
  EXPECT_TRUE(eval("n >= 3 and n < 3.5"));
  EXPECT_TRUE(eval("n > 10 or real"));
  EXPECT_TRUE(eval("not (n > 10) and shape in ['linear', 'convex']"));
  EXPECT_FALSE(eval("shape in ['linear']"));
  EXPECT_TRUE(eval("real == true"));
  EXPECT_TRUE(eval("true"));
  EXPECT_FALSE(eval("false or not real"));
  EXPECT_TRUE(eval("n == 3 and n <= 3 and n > 2.5e0"));
  EXPECT_EQ(Predicate::parse("n > 1 and shape == 'x' or n < 0", kSchema).referenced(),
            (std::vector<std::string>{"n", "shape"}));
}

TEST(Predicate, AbsentFeatureComparesFalse) {
  rules::Features f{{"shape", std::string("convex")}};
  EXPECT_FALSE(Predicate::parse("n < 1000", kSchema).evaluate(f));
  EXPECT_FALSE(Predicate::parse("n >= 1000", kSchema).evaluate(f));
  EXPECT_TRUE(Predicate::parse("not n >= 1000", kSchema).evaluate(f));
  EXPECT_FALSE(Predicate::parse("real", kSchema).evaluate(f));
}

TEST(Predicate, SyntaxAndTypeErrors) {
  for (const char* bad : {"shape ==", "shape == convex", "n == 'three'", "shape < 'a'", "colour == 'red'",
                          "(n > 1", "n > 1 and", "shape in []", "real and and real", "n > 1 extra",
                          "shape == 'unterminated"}) {
    try {
      Predicate::parse(bad, kSchema);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::RuleSyntax) << bad;
      EXPECT_TRUE(e.details().contains("offset")) << bad;
    }
  }
}

TEST(RuleTable, DefaultTableParses) {
  const auto& t = recommend::default_rule_table();
  EXPECT_GE(t.rules.size(), 16u);
  EXPECT_EQ(t.family_priority.size(), recommend::all_families().size());
  std::set<std::string> ids;
  for (const auto& r : t.rules) {
    EXPECT_TRUE(ids.insert(r.rule_id).second) << r.rule_id;
    EXPECT_FALSE(r.citation.empty()) << r.rule_id;
  }
}

// Every family, with `first` moved to the front in the given order.
std::string priority_json(const std::vector<Family>& first = {}) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto f : first) arr.push_back(std::string(recommend::to_string(f)));
  for (auto f : recommend::all_families())
    if (std::find(first.begin(), first.end(), f) == first.end()) arr.push_back(std::string(recommend::to_string(f)));
  return arr.dump();
}

TEST(RuleTable, Errors) {
  EXPECT_THROW(recommend::parse_rule_table("[]"), Error);
  EXPECT_THROW(recommend::parse_rule_table(R"({"version": 1, "family_priority": [], "rules": []})"), Error);
  const std::string bad_predicate = R"({"version": 1, "family_priority": )" + priority_json() + R"(, "rules": [
      {"rule_id": "r", "predicate": "shape === 'x'", "family": "quasi_newton", "rank_weight": 1, "citation": "c"}]})";
  try {
    recommend::parse_rule_table(bad_predicate);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RuleSyntax);
  }
}

TEST(Recommend, GradientExample) {
  const auto recs = recommend::recommend(load_spec("convex_gradient"));
  ASSERT_FALSE(recs.empty());
  const auto top = recs.front().family();
  EXPECT_TRUE(top == Family::GradientBased || top == Family::QuasiNewton);
  EXPECT_NE(recommend::explain(recs.front()).find("analytic"), std::string::npos);
}

TEST(Recommend, FunnelExample) {
  const auto recs = recommend::recommend(load_spec("multimodal_funnel"));
  EXPECT_EQ(recs.front().family(), Family::RestartFunnel);
  EXPECT_NE(recommend::explain(recs.front()).find("funnel"), std::string::npos);
}

TEST(Recommend, ParetoFrontExample) {
  const auto recs = recommend::recommend(load_spec("pareto_front"));
  EXPECT_EQ(recs.front().family(), Family::MultiObjective);
  auto scal = std::find_if(recs.begin(), recs.end(), [](const auto& r) { return r.family() == Family::Scalarization; });
  ASSERT_NE(scal, recs.end());
  EXPECT_GT(scal->rank(), 1);
}

TEST(Recommend, SingleBestPrefersScalarization) {
  EXPECT_EQ(recommend::recommend(load_spec("conflicting_single_best")).front().family(), Family::Scalarization);
}

TEST(Recommend, OtherFixturesRankOne) {
  const std::map<std::string, Family> want = {
      {"linear_program", Family::LinearProgramming},     {"quadratic_program", Family::QuadraticProgramming},
      {"multimodal_unstructured", Family::GlobalMultistart}, {"noisy_objective", Family::NoiseTolerant},
      {"expensive_simulation", Family::ModelBasedSurrogate}, {"unknown_shape", Family::DirectSearchLocal},
      {"convex_no_gradient", Family::DirectSearchLocal},  {"discrete_funnel", Family::RestartFunnel},
  };
  for (const auto& [name, family] : want)
    EXPECT_EQ(recommend::recommend(load_spec(name)).front().family(), family) << name;
}

TEST(Recommend, RanksContiguousAndTracesNonEmpty) {
  for (const auto& name : fixture_names()) {
    const auto recs = recommend::recommend(load_spec(name));
    for (std::size_t i = 0; i < recs.size(); ++i) {
      EXPECT_EQ(recs[i].rank(), static_cast<int>(i + 1)) << name;
      EXPECT_FALSE(recs[i].trace().empty()) << name;
      if (i > 0) {
        EXPECT_GE(recs[i - 1].score(), recs[i].score()) << name;
      }
    }
  }
}

TEST(Recommend, EveryRuleFiresOnSomeFixture) {
  std::set<std::string> fired;
  for (const auto& name : fixture_names())
    for (const auto& rec : recommend::recommend(load_spec(name)))
      for (const auto& f : rec.trace()) fired.insert(f.rule_id);
  for (const auto& rule : recommend::default_rule_table().rules)
    EXPECT_TRUE(fired.count(rule.rule_id)) << rule.rule_id << " never fires";
}

TEST(Recommend, Deterministic) {
  for (const auto& name : fixture_names()) {
    const auto spec = load_spec(name);
    const auto first = recommend::to_json(recommend::recommend(spec)).dump();
    for (int i = 0; i < 20; ++i) EXPECT_EQ(recommend::to_json(recommend::recommend(spec)).dump(), first);
  }
}

TEST(Recommend, UnfinalizedSpec) {
  auto spec = load_spec("unknown_shape");
  spec.formulation.reset();
  try {
    recommend::recommend(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unfinalized);
  }
}

TEST(Recommend, HiddenConstraintNotedInTrace) {
  const auto recs = recommend::recommend(load_spec("expensive_simulation"));
  bool hidden = false, simulation = false;
  for (const auto& f : recs.front().trace()) {
    hidden |= f.rule_id == "hidden-constraint";
    simulation |= f.rule_id == "simulation-constraint";
  }
  EXPECT_TRUE(hidden);
  EXPECT_TRUE(simulation);
}

TEST(Recommend, EvalsAffordableUsesBudgetOverWorstCost) {
  const auto feats = recommend::extract_features(load_spec("expensive_simulation"));
  ASSERT_TRUE(feats.count("f"));
  EXPECT_EQ(std::get<double>(feats.at("f").at("evals_affordable")), 7200.0 / 60.0);
}

TEST(Recommendation, RejectsInvalidConstruction) {
  recommend::RuleFire fire{"r", "", {}, "c"};
  EXPECT_THROW(recommend::Recommendation(Family::QuasiNewton, 0, 1.0, {fire}), Error);
  EXPECT_THROW(recommend::Recommendation(Family::QuasiNewton, 1, 1.0, {}), Error);
  EXPECT_NO_THROW(recommend::Recommendation(Family::QuasiNewton, 1, 1.0, {fire}));
}

// Families ordered by how much structure they assume; a rank-1 family with a
// lower level is "easier".
int difficulty(Family f) {
  switch (f) {
    case Family::AnalyticSolution:
    case Family::LinearProgramming:
    case Family::QuadraticProgramming: return 0;
    case Family::GradientBased:
    case Family::QuasiNewton: return 1;
    default: return 2;
  }
}

TEST(Recommend, MoreKnowledgeOfDifficultyNeverEasier) {
  for (const auto& name : fixture_names()) {
    const auto spec = load_spec(name);
    const auto before = recommend::recommend(spec).front().family();
    for (std::size_t i = 0; i < spec.objectives.size(); ++i) {
      if (spec.objectives[i].shape != model::Shape::Unknown) continue;
      for (auto structure : {model::GlobalStructure::Unknown, model::GlobalStructure::Funnel,
                             model::GlobalStructure::None, model::GlobalStructure::Symmetric}) {
        auto harder = spec;
        harder.objectives[i].shape = model::Shape::Multimodal;
        harder.objectives[i].global_structure = structure;
        const auto after = recommend::recommend(harder).front().family();
        EXPECT_NE(after, Family::AnalyticSolution) << name;
        EXPECT_GE(difficulty(after), difficulty(before)) << name;
      }
    }
  }
}

TEST(Recommend, MarkdownHasTableAndTrace) {
  const auto md = recommend::render_markdown(recommend::recommend(load_spec("multimodal_funnel")));
  EXPECT_NE(md.find("| rank | family |"), std::string::npos);
  EXPECT_NE(md.find("RestartFunnel"), std::string::npos);
  EXPECT_NE(md.find("## Trace"), std::string::npos);
}

TEST(Recommend, CustomTable) {
  const std::string doc = R"({"version": 3, "family_priority": )" +
                          priority_json({Family::Scalarization, Family::QuasiNewton}) + R"(, "rules": [
      {"rule_id": "a", "predicate": "n_variables > 1", "family": "quasi_newton", "rank_weight": 5, "citation": "x"},
      {"rule_id": "b", "predicate": "n_variables > 1", "family": "scalarization", "rank_weight": 5, "citation": "y"}]})";
  const auto recs = recommend::recommend(load_spec("unknown_shape"), recommend::parse_rule_table(doc));
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].family(), Family::Scalarization);
  EXPECT_EQ(recs[1].family(), Family::QuasiNewton);
}

}  // namespace
}  // namespace greybox
