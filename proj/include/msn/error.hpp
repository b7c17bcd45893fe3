#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace msn {

enum class ErrorCode {
  MalformedRecord,
  DuplicateEventId,
  UnknownKind,
  UnknownObject,
  SelfContact,
  ConflictingAuthor,
  UnknownUser,
  NoRelation,
  InvalidImportance,
  InvalidConfig,
  NoUsers,
  InsufficientCandidates,
  OutOfOrderFeedback,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateEventId: return "DuplicateEventId";
    case ErrorCode::UnknownKind: return "UnknownKind";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::SelfContact: return "SelfContact";
    case ErrorCode::ConflictingAuthor: return "ConflictingAuthor";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::NoRelation: return "NoRelation";
    case ErrorCode::InvalidImportance: return "InvalidImportance";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NoUsers: return "NoUsers";
    case ErrorCode::InsufficientCandidates: return "InsufficientCandidates";
    case ErrorCode::OutOfOrderFeedback: return "OutOfOrderFeedback";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

// Every failure the engine reports. `line` is set for parse errors (1-based).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        code_(code),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  std::size_t line_;
};

}  // namespace msn
