#include "vfsl/error.hpp"

namespace vfsl {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::NameCountMismatch: return "NameCountMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::ZeroNormRow: return "ZeroNormRow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::InsufficientPrompts: return "InsufficientPrompts";
    case ErrorCode::NotEnoughItems: return "NotEnoughItems";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BadMetadata: return "BadMetadata";
  }
  return "Unknown";
}

}  // namespace vfsl
