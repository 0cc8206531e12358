#include "greybox/errors.hpp"

namespace greybox {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Version: return "VersionError";
    case ErrorKind::EmptyObjectives: return "EmptyObjectives";
    case ErrorKind::InconsistentFlags: return "InconsistentFlags";
    case ErrorKind::Unclassifiable: return "Unclassifiable";
    case ErrorKind::EmptyParticipants: return "EmptyParticipants";
    case ErrorKind::UnknownInstance: return "UnknownInstance";
    case ErrorKind::AnswerTypeMismatch: return "AnswerTypeMismatch";
    case ErrorKind::QrakInconsistent: return "QrakInconsistent";
    case ErrorKind::RequiredItem: return "RequiredItem";
    case ErrorKind::EmptyReason: return "EmptyReason";
    case ErrorKind::IncompleteSession: return "IncompleteSession";
    case ErrorKind::SpecInvalid: return "SpecInvalid";
    case ErrorKind::InvalidStageTransition: return "InvalidStageTransition";
    case ErrorKind::Unfinalized: return "Unfinalized";
    case ErrorKind::RuleSyntax: return "RuleSyntax";
    case ErrorKind::DimensionZero: return "DimensionZero";
    case ErrorKind::BudgetZero: return "BudgetZero";
    case ErrorKind::InvalidDomain: return "InvalidDomain";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::ResponseWithLevels: return "ResponseWithLevels";
    case ErrorKind::NoiseConditioning: return "NoiseConditioning";
    case ErrorKind::MissingControllable: return "MissingControllable";
    case ErrorKind::MissingResponse: return "MissingResponse";
    case ErrorKind::IncompleteRuns: return "IncompleteRuns";
    case ErrorKind::UnknownResponse: return "UnknownResponse";
  }
  return "Unknown";
}

nlohmann::json Error::to_json() const {
  nlohmann::json out;
  out["error"] = std::string(to_string(kind_));
  out["message"] = what();
  out["details"] = details_;
  return out;
}

}  // namespace greybox
