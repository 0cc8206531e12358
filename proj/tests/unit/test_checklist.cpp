#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "greybox/checklist.hpp"
#include "greybox/errors.hpp"
#include "greybox/spec_io.hpp"
#include "checklist_driver.hpp"
#include "test_support.hpp"

namespace greybox {
namespace {

using checklist::ChecklistSession;
using checklist::Stage;
using checklist::Status;
using nlohmann::json;
using testing::at;

const auto kNow = at(1700000000);

ChecklistSession fresh() {
  return checklist::new_session(checklist::default_template_ptr(), {{"A", "client"}, {"B", "optimizer"}}, "s1",
                                kNow);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidArgument;
}

std::set<std::string> pending_ids(const ChecklistSession& s) {
  std::set<std::string> out;
  for (const auto& i : checklist::pending_instances(s)) out.insert(i.id);
  return out;
}

TEST(Template, TenItems) {
  const auto& tpl = checklist::default_template();
  ASSERT_EQ(tpl.items.size(), 10u);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < tpl.items.size(); ++i) {
    EXPECT_EQ(tpl.items[i].id, "item" + std::to_string(i + 1));
    ids.insert(tpl.items[i].id);
    EXPECT_EQ(tpl.items[i].required_for_finalize, i >= 7) << tpl.items[i].id;
  }
  EXPECT_EQ(ids.size(), 10u);
}

TEST(Template, PromptsCoverChecklistBullets) {
  // Keywords per item id; each must appear in the prompt or a bullet prompt.
  const std::map<std::string, std::vector<std::string>> keywords = {
      {"item1", {"participant", "reason for attending", "role"}},
      {"item2", {"feasible", "robust", "best", "local optima", "level set", "Pareto set", "Pareto front",
                 "interactive"}},
      {"item3", {"theoretical relationships", "expert knowledge", "previous attempts", "existing data",
                 "wider study"}},
      {"item4", {"objective", "terms with different meanings", "additively separable", "analytic form",
                 "gradient", "linear", "quadratic", "convex", "multimodal", "funnel", "symmetries",
                 "deterministic", "noisy", "domain", "image", "bounds", "cost", "range", "distribution"}},
      {"item5", {"decision variable", "data type", "lower and upper bound", "currently used", "influence",
                 "nonlinear transformation", "log", "sqrt"}},
      {"item6", {"constraint", "known (K)", "hidden (H)", "a priori (A)", "simulation (S)", "relaxable (R)",
                 "unrelaxable (U)", "quantifiable (Q)", "cost"}},
      {"item7", {"conflict"}},
      {"item8", {"problem formulation"}},
      {"item9", {"cost model", "budget"}},
      {"item10", {"responsible"}},
  };
  for (const auto& item : checklist::default_template().items) {
    std::string text = item.prompt;
    for (const auto& b : item.bullets) text += " " + b.prompt;
    for (const auto& k : keywords.at(item.id))
      EXPECT_NE(text.find(k), std::string::npos) << item.id << " lacks '" << k << "'";
  }
}

TEST(Template, WriteParseRoundTrip) {
  const auto doc = checklist::write_template(checklist::default_template());
  const auto back = checklist::parse_template(doc);
  EXPECT_EQ(checklist::write_template(back), doc);
}

TEST(Template, AdaptedWordingAcceptedButVocabularyFixed) {
  auto j = checklist::template_to_json(checklist::default_template());
  j["items"][1]["prompt"] = "Welches Ziel hat die Optimierung?";
  const auto adapted = checklist::parse_template(j.dump());
  EXPECT_EQ(adapted.items[1].prompt, "Welches Ziel hat die Optimierung?");

  auto bad = j;
  bad["items"][3]["bullets"][0]["key"] = "whatever";
  EXPECT_EQ(kind_of([&] { checklist::parse_template(bad.dump()); }), ErrorKind::Parse);
  bad = j;
  bad["items"][8]["required_for_finalize"] = false;
  EXPECT_EQ(kind_of([&] { checklist::parse_template(bad.dump()); }), ErrorKind::Parse);
  bad = j;
  bad["items"].erase(9);
  EXPECT_EQ(kind_of([&] { checklist::parse_template(bad.dump()); }), ErrorKind::Parse);
}

TEST(NewSession, NinePendingTopLevelItems) {
  const auto s = fresh();
  EXPECT_EQ(s.stage, Stage::Planning);
  EXPECT_EQ(s.revision, 1);
  EXPECT_EQ(s.states.at("item1").status, Status::Answered);
  const auto pending = pending_ids(s);
  EXPECT_EQ(pending.size(), 9u);
  for (int i = 2; i <= 10; ++i) EXPECT_TRUE(pending.count("item" + std::to_string(i)));
  EXPECT_EQ(s.draft.participants.size(), 2u);
}

TEST(NewSession, EmptyParticipants) {
  EXPECT_EQ(kind_of([] { checklist::new_session(checklist::default_template_ptr(), {}, "s", kNow); }),
            ErrorKind::EmptyParticipants);
}

TEST(NextItem, FreshSessionAsksForGoal) {
  const auto next = checklist::next_item(fresh());
  ASSERT_TRUE(next);
  EXPECT_EQ(next->id, "item2");
  EXPECT_EQ(next->answer_kind, checklist::AnswerKind::GoalKind);
}

TEST(NextItem, JumpToPendingInstance) {
  const auto s = fresh();
  EXPECT_EQ(checklist::next_item(s, std::string_view("item9"))->id, "item9");
  EXPECT_EQ(kind_of([&] { checklist::next_item(s, std::string_view("item1")); }), ErrorKind::UnknownInstance);
  EXPECT_EQ(kind_of([&] { checklist::next_item(s, std::string_view("item42")); }),
            ErrorKind::UnknownInstance);
}

TEST(NextItem, DecompositionExpandsPerPart) {
  auto s = fresh();
  s = checklist::answer(s, "item4", json::array({"f"}), kNow);
  EXPECT_TRUE(pending_ids(s).count("item4:f:shape"));
  s = checklist::answer(s, "item4:f:decomposition", {{"parts", {"g", "h"}}, {"additively_separable", "yes"}},
                        kNow);
  const auto pending = pending_ids(s);
  for (const char* part : {"f.g", "f.h"})
    for (const char* bullet : {"decomposition", "analytic", "shape", "global_structure", "deterministic",
                               "domain", "cost"})
      EXPECT_TRUE(pending.count(std::string("item4:") + part + ":" + bullet)) << part << " " << bullet;
  s = checklist::answer(s, "item4:f.g:shape", {{"shape", "convex"}}, kNow);
  ASSERT_EQ(s.draft.objectives.size(), 1u);
  ASSERT_EQ(s.draft.objectives[0].parts.size(), 2u);
  EXPECT_EQ(s.draft.objectives[0].parts[0].shape, model::Shape::Convex);
  EXPECT_EQ(s.draft.objectives[0].additively_separable, Ternary::Yes);
}

TEST(NextItem, DoneWhenNothingPending) {
  const auto s = testing::play(testing::load_script(), kNow);
  EXPECT_EQ(checklist::next_item(s), std::nullopt);
  EXPECT_EQ(checklist::progress(s).pending, 0u);
}

TEST(Answer, HiddenConstraintIsNush) {
  auto s = fresh();
  s = checklist::answer(s, "item6", json::array({"c"}), kNow);
  s = checklist::answer(s, "item6:c:known", {{"known", false}}, kNow);
  ASSERT_EQ(s.draft.constraints.size(), 1u);
  ASSERT_TRUE(s.draft.constraints[0].code);
  EXPECT_EQ(s.draft.constraints[0].code->rendered(), "NUSH");
  // The remaining bullets are implied and skipped automatically.
  for (const char* b : {"a_priori", "relaxable", "quantifiable"})
    EXPECT_EQ(s.states.at(std::string("item6:c:") + b).status, Status::Skipped);
}

TEST(Answer, HiddenConstraintRejectsRelaxable) {
  auto s = fresh();
  s = checklist::answer(s, "item6", json::array({"c"}), kNow);
  s = checklist::answer(s, "item6:c:relaxable", {{"relaxable", "yes"}}, kNow);
  EXPECT_EQ(kind_of([&] { checklist::answer(s, "item6:c:known", {{"known", false}}, kNow); }),
            ErrorKind::QrakInconsistent);
  // The rejected answer left the session untouched.
  EXPECT_EQ(s.states.at("item6:c:known").status, Status::Pending);
}

TEST(Answer, KnownConstraintClassifiedWhenComplete) {
  auto s = fresh();
  s = checklist::answer(s, "item6", json::array({"c"}), kNow);
  s = checklist::answer(s, "item6:c:known", {{"known", true}}, kNow);
  s = checklist::answer(s, "item6:c:a_priori", {{"a_priori", "no"}, {"cost", nullptr}}, kNow);
  s = checklist::answer(s, "item6:c:relaxable", {{"relaxable", "yes"}}, kNow);
  EXPECT_FALSE(s.draft.constraints[0].code);
  s = checklist::answer(s, "item6:c:quantifiable", {{"quantifiable", "yes"}}, kNow);
  EXPECT_EQ(s.draft.constraints[0].code->rendered(), "QRSK");
}

TEST(Answer, VariableListSpawnsBlocks) {
  auto s = fresh();
  s = checklist::answer(s, "item5", json::array({"x1", "x2"}), kNow);
  const auto pending = pending_ids(s);
  for (const char* v : {"x1", "x2"})
    for (const char* b : {"domain", "default", "influence", "transform"})
      EXPECT_TRUE(pending.count(std::string("item5:") + v + ":" + b));
  EXPECT_EQ(s.draft.variables.size(), 2u);
}

TEST(Answer, TypeMismatchAndUnknownInstance) {
  auto s = fresh();
  EXPECT_EQ(kind_of([&] { checklist::answer(s, "item2", "find_everything", kNow); }),
            ErrorKind::AnswerTypeMismatch);
  EXPECT_EQ(kind_of([&] { checklist::answer(s, "item2", 42, kNow); }), ErrorKind::AnswerTypeMismatch);
  EXPECT_EQ(kind_of([&] { checklist::answer(s, "item5", json::array({"a.b"}), kNow); }),
            ErrorKind::AnswerTypeMismatch);
  EXPECT_EQ(kind_of([&] { checklist::answer(s, "item4:f:shape", {{"shape", "convex"}}, kNow); }),
            ErrorKind::UnknownInstance);
}

TEST(Answer, ReansweringRebuildsDraft) {
  auto s = fresh();
  s = checklist::answer(s, "item2", "find_best", kNow);
  s = checklist::answer(s, "item2", "find_robust", kNow);
  EXPECT_EQ(s.draft.goal, model::GoalKind::FindRobust);
  EXPECT_EQ(s.revision, 3);
}

TEST(Answer, RenamingKeepsAnsweredInstances) {
  auto s = fresh();
  s = checklist::answer(s, "item5", json::array({"x1"}), kNow);
  s = checklist::answer(s, "item5:x1:transform", {{"transform", "log"}}, kNow);
  s = checklist::answer(s, "item5", json::array({"y"}), kNow);
  EXPECT_EQ(s.states.at("item5:x1:transform").status, Status::Answered);
  EXPECT_FALSE(s.states.count("item5:x1:domain"));
  EXPECT_TRUE(pending_ids(s).count("item5:y:domain"));
}

TEST(Skip, UnknownStructureRecorded) {
  auto s = fresh();
  s = checklist::answer(s, "item4", json::array({"f"}), kNow);
  s = checklist::answer(s, "item4:f:shape", {{"shape", "multimodal"}}, kNow);
  s = checklist::skip(s, "item4:f:global_structure", "no data", kNow);
  EXPECT_EQ(s.states.at("item4:f:global_structure").status, Status::Skipped);
  EXPECT_EQ(s.states.at("item4:f:global_structure").reason, "no data");
  EXPECT_EQ(s.draft.objectives[0].global_structure, model::GlobalStructure::Unknown);
}

TEST(Skip, Errors) {
  const auto s = fresh();
  EXPECT_EQ(kind_of([&] { checklist::skip(s, "item8", "ran out of time", kNow); }), ErrorKind::RequiredItem);
  EXPECT_EQ(kind_of([&] { checklist::skip(s, "item2", "", kNow); }), ErrorKind::EmptyReason);
  EXPECT_EQ(kind_of([&] { checklist::skip(s, "item2", "   ", kNow); }), ErrorKind::EmptyReason);
  EXPECT_EQ(kind_of([&] { checklist::skip(s, "nope", "x", kNow); }), ErrorKind::UnknownInstance);
}

TEST(Skip, ConflictsRequiredWithSeveralSelectedObjectives) {
  auto s = fresh();
  s = checklist::answer(s, "item4", json::array({"f", "g"}), kNow);
  s = checklist::skip(s, "item7", "single objective after all", kNow);
  s = checklist::answer(s, "item8",
                        {{"selected_objectives", {"f", "g"}},
                         {"selected_variables", json::array()},
                         {"selected_constraints", json::array()},
                         {"paradigm", "multi_objective"}},
                        kNow);
  // Already skipped: finalize reports it as required.
  try {
    checklist::finalize(s, kNow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteSession);
    const auto req = e.details().at("required");
    EXPECT_NE(std::find(req.begin(), req.end(), "item7"), req.end()) << e.details().dump();
  }
}

TEST(Finalize, Walkthrough) {
  const auto s = testing::play(testing::load_script(), kNow);
  const auto done = checklist::finalize(s, at(1700000100));
  EXPECT_EQ(done.session.stage, Stage::Design);
  EXPECT_EQ(done.session.revision, s.revision + 1);
  EXPECT_EQ(done.session.updated_at, at(1700000100));
  EXPECT_TRUE(done.spec.goal);
  EXPECT_GE(done.spec.objectives.size(), 1u);
  EXPECT_GE(done.spec.variables.size(), 1u);
  EXPECT_FALSE(model::has_errors(model::validate_spec(done.spec)));
  EXPECT_EQ(done.spec, done.session.draft);
  EXPECT_EQ(done.spec.find_constraint("solver_crash")->code->rendered(), "NUSH");
  EXPECT_EQ(done.spec.find_constraint("max_temp")->code->rendered(), "QUAK");
  // Planning is over.
  EXPECT_EQ(kind_of([&] { checklist::answer(done.session, "item2", "find_robust", kNow); }),
            ErrorKind::InvalidStageTransition);
}

TEST(Finalize, PendingCostItem) {
  auto script = testing::load_script();
  script.steps.erase(std::remove_if(script.steps.begin(), script.steps.end(),
                                    [](const auto& st) { return st.instance == "item9"; }),
                     script.steps.end());
  const auto s = testing::play(script, kNow);
  try {
    checklist::finalize(s, kNow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteSession);
    EXPECT_EQ(e.details().at("pending"), json::array({"item9"}));
    EXPECT_EQ(e.details().at("required"), json::array({"item9"}));
  }
}

TEST(Finalize, DanglingFormulationReference) {
  auto script = testing::load_script();
  for (auto& st : script.steps)
    if (st.instance == "item8") st.value["selected_variables"] = {"temperature", "flow"};
  const auto s = testing::play(script, kNow);
  try {
    checklist::finalize(s, kNow);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SpecInvalid);
    EXPECT_NE(e.details().dump().find("DANGLING_REF"), std::string::npos);
  }
}

TEST(Stage, ForwardOrBackToPlanning) {
  auto done = checklist::finalize(testing::play(testing::load_script(), kNow), kNow).session;
  auto s = checklist::set_stage(done, Stage::Experimentation, kNow);
  EXPECT_EQ(kind_of([&] { checklist::set_stage(s, Stage::Implementation, kNow); }),
            ErrorKind::InvalidStageTransition);
  s = checklist::set_stage(s, Stage::Planning, kNow);
  EXPECT_EQ(s.stage, Stage::Planning);
  EXPECT_EQ(kind_of([&] { checklist::set_stage(s, Stage::Planning, kNow); }),
            ErrorKind::InvalidStageTransition);
}

TEST(Reopen, DraftEqualsPreviousSpec) {
  const auto spec = checklist::finalize(testing::play(testing::load_script(), kNow), kNow).spec;
  const auto s = checklist::reopen_session(checklist::default_template_ptr(), spec, {}, "iter2", kNow);
  EXPECT_EQ(s.stage, Stage::Planning);
  EXPECT_EQ(s.draft, spec);
  EXPECT_EQ(checklist::finalize(s, kNow).spec, spec);
}

TEST(SaveLoad, MidSessionRoundTrip) {
  auto script = testing::load_script();
  script.steps.resize(20);
  const auto s = testing::play(script, kNow);
  const auto doc = checklist::save_session(s);
  const auto back = checklist::load_session(doc, checklist::default_template_ptr());
  EXPECT_EQ(back, s);
  EXPECT_EQ(checklist::save_session(back), doc);
}

TEST(SaveLoad, TruncatedDocument) {
  const auto doc = checklist::save_session(fresh());
  EXPECT_EQ(kind_of([&] { checklist::load_session(doc.substr(0, doc.size() / 2), nullptr); }),
            ErrorKind::Parse);
}

TEST(SaveLoad, TemplateVersionMismatch) {
  auto j = json::parse(checklist::save_session(fresh()));
  j["template_version"] = 2;
  EXPECT_EQ(kind_of([&] { checklist::load_session(j.dump(), checklist::default_template_ptr()); }),
            ErrorKind::Version);
  j = json::parse(checklist::save_session(fresh()));
  j["schema_version"] = 7;
  EXPECT_EQ(kind_of([&] { checklist::load_session(j.dump(), checklist::default_template_ptr()); }),
            ErrorKind::Version);
}

TEST(Timestamps, FormatAndParse) {
  EXPECT_EQ(checklist::format_timestamp(at(0)), "1970-01-01T00:00:00Z");
  EXPECT_EQ(checklist::format_timestamp(kNow), "2023-11-14T22:13:20Z");
  EXPECT_EQ(checklist::parse_timestamp("2023-11-14T22:13:20Z"), kNow);
  EXPECT_EQ(checklist::parse_timestamp("2023-02-30T00:00:00Z"), std::nullopt);
  EXPECT_EQ(checklist::parse_timestamp("2023-11-14 22:13:20"), std::nullopt);
}

TEST(ChecklistProperty, RandomSequencesUpholdFinalizePrecondition) {
  int successes = 0, incomplete = 0, invalid = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto out = testing::random_sequence(seed, kNow);
    ASSERT_EQ(out.violation, "") << "seed " << seed;
    const auto& s = out.session;
    if (out.spec) {
      ++successes;
      EXPECT_TRUE(out.precondition) << "seed " << seed;
      EXPECT_FALSE(model::has_errors(model::validate_spec(*out.spec)));
    } else if (out.finalize_error == ErrorKind::IncompleteSession) {
      ++incomplete;
      EXPECT_FALSE(out.precondition) << "seed " << seed;
    } else {
      ASSERT_EQ(out.finalize_error, ErrorKind::SpecInvalid);
      ++invalid;
      EXPECT_TRUE(out.precondition);
      EXPECT_TRUE(model::has_errors(model::validate_spec(s.draft)));
    }
    // Every reachable session round-trips.
    const auto doc = checklist::save_session(s);
    ASSERT_EQ(checklist::load_session(doc, checklist::default_template_ptr()), s) << "seed " << seed;
  }
  EXPECT_GT(successes, 0);
  EXPECT_GT(incomplete, 0);
  RecordProperty("finalized", successes);
  RecordProperty("incomplete", incomplete);
  RecordProperty("spec_invalid", invalid);
}

}  // namespace
}  // namespace greybox
