#pragma once

// Session state machine for the ten-item problem-definition checklist.
//
// Every answerable unit is an "instance". Top-level items have the item id as
// instance id ("item2"). Items 4-6 expand per entity: after the objective
// list is answered, each objective gets one instance per question bullet,
// e.g. "item4:f:shape"; decomposed objectives expand again for each part
// ("item4:f.g:shape"). Engine functions are pure: they take a session by
// const reference and return the updated copy.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "greybox/problem_model.hpp"

namespace greybox::checklist {

enum class AnswerKind {
  FreeText,
  GoalKind,
  ObjectiveBlock,
  VariableBlock,
  ConstraintBlock,
  PairList,
  FormulationBlock,
  CostBlock,
  ResponsibilityList,
  ParticipantList,
};

enum class ExpandsPer { Objective, ObjectivePart, Variable, Constraint };

struct Bullet {
  std::string key;
  std::string prompt;
};

struct Item {
  std::string id;
  std::string prompt;
  AnswerKind answer_kind = AnswerKind::FreeText;
  std::optional<ExpandsPer> expands_per;
  bool required_for_finalize = false;
  /// Per-entity questions for items that expand.
  std::vector<Bullet> bullets;
};

struct ChecklistTemplate {
  int version = 1;
  std::vector<Item> items;

  const Item* find(std::string_view id) const;
};

/// The shipped template (compiled in from data/checklist_template.json).
const ChecklistTemplate& default_template();
std::shared_ptr<const ChecklistTemplate> default_template_ptr();

/// Parses an adapted template. Wording is free; ids, answer kinds and bullet
/// keys must match the engine's vocabulary (Error{Parse} otherwise).
ChecklistTemplate parse_template(std::string_view document);
std::string write_template(const ChecklistTemplate& tpl);
nlohmann::json template_to_json(const ChecklistTemplate& tpl);

/// Stages of the algorithm engineering cycle.
enum class Stage { Planning, Design, Implementation, Experimentation, Application };

enum class Status { Pending, Answered, Skipped };

struct InstanceState {
  Status status = Status::Pending;
  nlohmann::json answer;  // Answered only
  std::string reason;     // Skipped only

  friend bool operator==(const InstanceState&, const InstanceState&) = default;
};

using Timestamp = std::chrono::sys_seconds;

struct ChecklistSession {
  std::string id;
  int template_version = 0;
  /// Incremented by every successful mutation.
  std::int64_t revision = 1;
  Stage stage = Stage::Planning;
  Timestamp created_at{};
  Timestamp updated_at{};
  /// instance id -> state. Answered and skipped instances are never removed.
  std::map<std::string, InstanceState> states;
  /// Rebuilt from the latest answers after every mutation.
  model::ProblemSpec draft;
  std::shared_ptr<const ChecklistTemplate> tpl;

  friend bool operator==(const ChecklistSession& a, const ChecklistSession& b) {
    return a.id == b.id && a.template_version == b.template_version &&
           a.revision == b.revision && a.stage == b.stage && a.created_at == b.created_at &&
           a.updated_at == b.updated_at && a.states == b.states && a.draft == b.draft;
  }
};

struct ItemInstance {
  std::string id;
  std::string item_id;
  /// Entity path ("f", "f.g", "x1"); empty for top-level instances.
  std::string entity;
  /// Bullet key ("shape", "known", ...); empty for top-level instances.
  std::string bullet;
  std::string prompt;
  AnswerKind answer_kind = AnswerKind::FreeText;
};

struct Progress {
  std::size_t answered = 0;
  std::size_t skipped = 0;
  std::size_t pending = 0;
};

/// Item 1 is answered from `participants`; everything else starts pending.
ChecklistSession new_session(std::shared_ptr<const ChecklistTemplate> tpl,
                             const std::vector<model::PersonRole>& participants,
                             std::string id, Timestamp now);

/// Starts a new cycle iteration from an existing spec: every instance the
/// spec can answer is pre-answered, so the draft equals `spec`. Uses
/// spec.participants when `participants` is empty.
ChecklistSession reopen_session(std::shared_ptr<const ChecklistTemplate> tpl,
                                const model::ProblemSpec& spec,
                                const std::vector<model::PersonRole>& participants,
                                std::string id, Timestamp now);

/// Instances in template order, including expanded ones.
std::vector<ItemInstance> instances(const ChecklistSession& session);
std::vector<ItemInstance> pending_instances(const ChecklistSession& session);
Progress progress(const ChecklistSession& session);

/// First pending instance, or the requested pending instance when `jump` is
/// given. nullopt means done.
std::optional<ItemInstance> next_item(const ChecklistSession& session,
                                      std::optional<std::string_view> jump = std::nullopt);

ChecklistSession answer(const ChecklistSession& session, std::string_view instance_id,
                        const nlohmann::json& value, Timestamp now);

ChecklistSession skip(const ChecklistSession& session, std::string_view instance_id,
                      std::string_view reason, Timestamp now);

struct Finalized {
  model::ProblemSpec spec;
  ChecklistSession session;
};

/// Requires no pending instances and items 8-10 answered; item 7 must be
/// answered when more than one objective is selected. The spec must lint
/// without errors. Moves the session to the Design stage.
Finalized finalize(const ChecklistSession& session, Timestamp now);

/// Forward moves only, or back to Planning to begin a new iteration.
ChecklistSession set_stage(const ChecklistSession& session, Stage stage, Timestamp now);

std::string save_session(const ChecklistSession& session);
nlohmann::json session_to_json(const ChecklistSession& session);
/// Error{Parse} for malformed documents, Error{Version} for an unsupported
/// schema_version or a template_version different from tpl->version.
ChecklistSession load_session(std::string_view document,
                              std::shared_ptr<const ChecklistTemplate> tpl);

nlohmann::json instance_to_json(const ItemInstance& instance);

std::string_view to_string(AnswerKind);
std::string_view to_string(Stage);
std::string_view to_string(Status);
std::optional<Stage> stage_from_string(std::string_view);

std::string format_timestamp(Timestamp t);
std::optional<Timestamp> parse_timestamp(std::string_view s);

}  // namespace greybox::checklist
