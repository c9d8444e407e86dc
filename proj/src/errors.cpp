#include "zkmcp/errors.hpp"

namespace zkmcp {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTypeTooLong: return "TypeTooLong";
    case ErrorCode::kIllegalByte: return "IllegalByte";
    case ErrorCode::kMalformedEnvelope: return "MalformedEnvelope";
    case ErrorCode::kTooLong: return "TooLong";
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kInvalidTypeTable: return "InvalidTypeTable";
    case ErrorCode::kWrongLength: return "WrongLength";
    case ErrorCode::kUnsupportedArity: return "UnsupportedArity";
    case ErrorCode::kBadFieldElement: return "BadFieldElement";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kWrongMessageCount: return "WrongMessageCount";
    case ErrorCode::kMalformedMessage: return "MalformedMessage";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kRelationUnsatisfied: return "RelationUnsatisfied";
    case ErrorCode::kMalformedProof: return "MalformedProof";
    case ErrorCode::kCorruptCrs: return "CorruptCrs";
    case ErrorCode::kCrsMismatch: return "CrsMismatch";
    case ErrorCode::kSessionNotActive: return "SessionNotActive";
    case ErrorCode::kIllegalTransition: return "IllegalTransition";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kAspUnreachable: return "AspUnreachable";
    case ErrorCode::kProveFailure: return "ProveFailure";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kConnectionRefused: return "ConnectionRefused";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kBindFailure: return "BindFailure";
    case ErrorCode::kDecode: return "Decode";
    case ErrorCode::kVersion: return "Version";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kOutOfBudget: return "OutOfBudget";
  }
  return "Unknown";
}

}  // namespace zkmcp
