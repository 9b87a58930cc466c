#include "fscil/errors.hpp"

namespace fscil {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::RowLengthMismatch: return "RowLengthMismatch";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::NonPositiveLayout: return "NonPositiveLayout";
    case ErrorCode::UnequalNovelSizes: return "UnequalNovelSizes";
    case ErrorCode::SessionOutOfRange: return "SessionOutOfRange";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::GridTooSmall: return "GridTooSmall";
    case ErrorCode::NoNovelTasks: return "NoNovelTasks";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::UnknownMetric: return "UnknownMetric";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace fscil
