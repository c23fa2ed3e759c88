#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aiodc {

enum class ErrorCode {
  FileMissing,
  ParseError,
  IoError,
  DuplicateCharacteristic,
  BadLayer,
  UnknownCharacteristic,
  LayerMismatch,
  ModelMismatch,
  EmptyPath,
  DuplicateId,
  UnknownContextId,
  TooFewAnnotators,
  DuplicateDefectId,
  UnknownAnnotator,
  UnknownDefect,
  NotDisputed,
  ResolverIsParty,
  LabelsFrozen,
  NoOverlap,
  DegenerateMarginals,
  UnresolvedDisputes,
  EmptyInput,
  DegenerateTable,
  UnsupportedFormat,
  UnknownSession,
  BindFailure,
  CorruptPersistence,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// All library failures surface as this exception; `code()` is the stable
// discriminator, `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aiodc
