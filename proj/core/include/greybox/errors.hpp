#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace greybox {

/// Every failure the library reports is a greybox::Error carrying one of
/// these kinds. The CLI maps kinds to exit codes and the HTTP service maps
/// them to status codes, so new kinds must be added to both tables.
enum class ErrorKind {
  InvalidArgument,
  Io,
  // document handling
  Parse,
  Version,
  // problem_model
  EmptyObjectives,
  // qrak
  InconsistentFlags,
  Unclassifiable,
  // checklist
  EmptyParticipants,
  UnknownInstance,
  AnswerTypeMismatch,
  QrakInconsistent,
  RequiredItem,
  EmptyReason,
  IncompleteSession,
  SpecInvalid,
  InvalidStageTransition,
  // recommender
  Unfinalized,
  RuleSyntax,
  // contopt
  DimensionZero,
  BudgetZero,
  InvalidDomain,
  InvalidConfig,
  // experiment
  DuplicateName,
  ResponseWithLevels,
  NoiseConditioning,
  MissingControllable,
  MissingResponse,
  IncompleteRuns,
  UnknownResponse,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, nlohmann::json details = nullptr)
      : std::runtime_error(message), kind_(kind), details_(std::move(details)) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Structured payload (field path, missing items, findings...). May be null.
  const nlohmann::json& details() const noexcept { return details_; }

  /// {"error": kind, "message": ..., "details": ...}
  nlohmann::json to_json() const;

 private:
  ErrorKind kind_;
  nlohmann::json details_;
};

}  // namespace greybox
