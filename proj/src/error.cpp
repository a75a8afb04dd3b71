#include "mcns/error.hpp"

namespace mcns {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NoDominantFrequency: return "NoDominantFrequency";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::TooFewSnippets: return "TooFewSnippets";
    case ErrorCode::MissingSnippets: return "MissingSnippets";
    case ErrorCode::DegenerateTreatment: return "DegenerateTreatment";
    case ErrorCode::NoMatches: return "NoMatches";
    case ErrorCode::NoOverlap: return "NoOverlap";
    case ErrorCode::NoLabel: return "NoLabel";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace mcns
