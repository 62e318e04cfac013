#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ktg {

enum class ErrorCode {
  InactiveEndpoint,
  EditContradictsState,
  SelfLoop,
  NotConnected,
  TooSmall,
  TargetHasInEdgesButNoIMask,
  TargetHasOutEdgesButNoOMask,
  IdCollision,
  NOutOfRange,
  ConfigInvalid,
  ParamInvalid,
  NoCandidates,
  StaleCandidate,
  CorruptRecord,
  EmptyGrammar,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InactiveEndpoint: return "InactiveEndpoint";
    case ErrorCode::EditContradictsState: return "EditContradictsState";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NotConnected: return "NotConnected";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::TargetHasInEdgesButNoIMask: return "TargetHasInEdgesButNoIMask";
    case ErrorCode::TargetHasOutEdgesButNoOMask: return "TargetHasOutEdgesButNoOMask";
    case ErrorCode::IdCollision: return "IdCollision";
    case ErrorCode::NOutOfRange: return "NOutOfRange";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::ParamInvalid: return "ParamInvalid";
    case ErrorCode::NoCandidates: return "NoCandidates";
    case ErrorCode::StaleCandidate: return "StaleCandidate";
    case ErrorCode::CorruptRecord: return "CorruptRecord";
    case ErrorCode::EmptyGrammar: return "EmptyGrammar";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace ktg
