#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "greybox/checklist.hpp"

namespace greybox::checklist::detail {

inline constexpr std::string_view kParticipants = "item1";
inline constexpr std::string_view kGoal = "item2";
inline constexpr std::string_view kBackground = "item3";
inline constexpr std::string_view kObjectives = "item4";
inline constexpr std::string_view kVariables = "item5";
inline constexpr std::string_view kConstraints = "item6";
inline constexpr std::string_view kConflicts = "item7";
inline constexpr std::string_view kFormulation = "item8";
inline constexpr std::string_view kCost = "item9";
inline constexpr std::string_view kResponsibilities = "item10";

std::string make_instance_id(std::string_view item, std::string_view entity, std::string_view bullet);

/// Draft spec from the answered instances. Throws AnswerTypeMismatch or
/// QrakInconsistent naming the offending instance.
model::ProblemSpec rebuild_draft(const std::map<std::string, InstanceState>& states);

std::vector<ItemInstance> active_instances(const ChecklistTemplate& tpl,
                                           const std::map<std::string, InstanceState>& states);

/// Adds missing active instances as pending and drops stale pending ones.
void sync_states(const ChecklistTemplate& tpl, std::map<std::string, InstanceState>& states);

}  // namespace greybox::checklist::detail
