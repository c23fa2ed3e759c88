#include "aiodc/error.hpp"

namespace aiodc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileMissing: return "FileMissing";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateCharacteristic: return "DuplicateCharacteristic";
    case ErrorCode::BadLayer: return "BadLayer";
    case ErrorCode::UnknownCharacteristic: return "UnknownCharacteristic";
    case ErrorCode::LayerMismatch: return "LayerMismatch";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::EmptyPath: return "EmptyPath";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownContextId: return "UnknownContextId";
    case ErrorCode::TooFewAnnotators: return "TooFewAnnotators";
    case ErrorCode::DuplicateDefectId: return "DuplicateDefectId";
    case ErrorCode::UnknownAnnotator: return "UnknownAnnotator";
    case ErrorCode::UnknownDefect: return "UnknownDefect";
    case ErrorCode::NotDisputed: return "NotDisputed";
    case ErrorCode::ResolverIsParty: return "ResolverIsParty";
    case ErrorCode::LabelsFrozen: return "LabelsFrozen";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::DegenerateMarginals: return "DegenerateMarginals";
    case ErrorCode::UnresolvedDisputes: return "UnresolvedDisputes";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DegenerateTable: return "DegenerateTable";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::BindFailure: return "BindFailure";
    case ErrorCode::CorruptPersistence: return "CorruptPersistence";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace aiodc
