#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "greybox/problem_model.hpp"

namespace greybox::model {

/// Canonical JSON document (sorted keys, trailing newline).
std::string write_spec(const ProblemSpec& spec);

/// Throws Error{Parse} with the offending field path, Error{Version} when
/// schema_version is not supported.
ProblemSpec parse_spec(std::string_view document);

nlohmann::json spec_to_json(const ProblemSpec& spec);
ProblemSpec spec_from_json(const nlohmann::json& doc);

// Pieces reused by the checklist answer decoders.
nlohmann::json cost_to_json(const CostEstimate& cost);
CostEstimate cost_from_json(const nlohmann::json& value, const std::string& path);
nlohmann::json objective_to_json(const Objective& objective);
nlohmann::json variable_to_json(const DecisionVariable& variable);
nlohmann::json constraint_to_json(const ConstraintSpec& constraint);
nlohmann::json formulation_to_json(const Formulation& formulation);
Formulation formulation_from_json(const nlohmann::json& value, const std::string& path);
nlohmann::json value_to_json(const Value& value);
Value value_from_json(const nlohmann::json& value, const std::string& path);
nlohmann::json transform_to_json(const Transform& transform);
Transform transform_from_json(const nlohmann::json& value, const std::string& path);
nlohmann::json findings_to_json(const std::vector<Finding>& findings);

/// Decodes a snake_case enum name or throws Error{Parse} listing the choices.
template <typename Enum>
Enum enum_from_json(const nlohmann::json& value, const std::string& path);

}  // namespace greybox::model
