#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vfsl {

// Stable error identifiers. The CLI prints them verbatim and derives its exit
// status from the enumerator value, so only append new codes at the end.
enum class ErrorCode {
  BadMagic = 1,
  UnsupportedVersion,
  TruncatedPayload,
  TrailingData,
  NonFiniteEntry,
  NameCountMismatch,
  IoFailure,
  EmptyMatrix,
  RaggedRows,
  ParseFailure,
  ZeroNormRow,
  DimensionMismatch,
  NotNormalized,
  InvalidLabel,
  SingularSystem,
  EmptyClass,
  InsufficientPrompts,
  NotEnoughItems,
  InvalidArgument,
  BadMetadata,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vfsl
