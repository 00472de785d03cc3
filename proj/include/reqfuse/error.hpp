#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reqfuse {

enum class ErrorCode {
  // corpus
  MissingColumn,
  UnknownLabel,
  DuplicatePairId,
  EmptyFile,
  MixedPositiveLabels,
  ClassTooSmall,
  // textrep
  EmptyCorpus,
  DegenerateStats,
  // simtrad
  DimMismatch,
  RankTooLarge,
  EmptyMatrix,
  WrongComponents,
  // llmknow
  MalformedRecord,
  DuplicateKey,
  DimInconsistent,
  MissingScore,
  MissingEmbedding,
  TooFewSamples,
  BadTargetDim,
  MissingBlock,
  // learn
  SingleClass,
  NonFinite,
  DimZero,
  BadHyperparam,
  EmptySpace,
  UnknownAlgorithm,
  // eval
  LengthMismatch,
  LeakageDetected,
  // pipeline
  MissingStore,
  BadConfig,
  // shared
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DuplicatePairId: return "DuplicatePairId";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MixedPositiveLabels: return "MixedPositiveLabels";
    case ErrorCode::ClassTooSmall: return "ClassTooSmall";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::DegenerateStats: return "DegenerateStats";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::WrongComponents: return "WrongComponents";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::DimInconsistent: return "DimInconsistent";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::MissingEmbedding: return "MissingEmbedding";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::BadTargetDim: return "BadTargetDim";
    case ErrorCode::MissingBlock: return "MissingBlock";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimZero: return "DimZero";
    case ErrorCode::BadHyperparam: return "BadHyperparam";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::UnknownAlgorithm: return "UnknownAlgorithm";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::LeakageDetected: return "LeakageDetected";
    case ErrorCode::MissingStore: return "MissingStore";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace reqfuse
