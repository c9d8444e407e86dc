#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zkmcp {

enum class ErrorCode {
  // message model
  kTypeTooLong,
  kIllegalByte,
  kMalformedEnvelope,
  kTooLong,
  kUnknownType,
  kInvalidTypeTable,
  // hashing
  kWrongLength,
  kUnsupportedArity,
  kBadFieldElement,
  // circuit
  kInvalidParams,
  kWrongMessageCount,
  kMalformedMessage,
  kShapeMismatch,
  // proof system
  kBackendUnavailable,
  kRelationUnsatisfied,
  kMalformedProof,
  kCorruptCrs,
  kCrsMismatch,
  // protocol
  kSessionNotActive,
  kIllegalTransition,
  kUnknownSession,
  kAspUnreachable,
  kProveFailure,
  // transport
  kTimeout,
  kConnectionRefused,
  kProtocolError,
  kBindFailure,
  kDecode,
  kVersion,
  // harness
  kIoFailure,
  kOutOfBudget,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zkmcp
