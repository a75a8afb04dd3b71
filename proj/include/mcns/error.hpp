#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcns {

enum class ErrorCode {
  EmptyInput,
  TooShort,
  NoDominantFrequency,
  EmptyDataset,
  WindowTooLong,
  SeriesTooShort,
  KTooLarge,
  LengthMismatch,
  EmptyCluster,
  TooFewSnippets,
  MissingSnippets,
  DegenerateTreatment,
  NoMatches,
  NoOverlap,
  NoLabel,
  ParseError,
  RaggedRows,
  EmptyFile,
  InvalidConfig,
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure surfaced by the library. `stage` names the pipeline step that
// raised it when the error travelled through build_structure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string stage = {})
      : std::runtime_error(message), code_(code), stage_(std::move(stage)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& stage() const noexcept { return stage_; }

  Error with_stage(std::string stage) const { return Error(code_, what(), std::move(stage)); }

 private:
  ErrorCode code_;
  std::string stage_;
};

}  // namespace mcns
