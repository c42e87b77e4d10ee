#include "car/errors.hpp"

namespace car {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDuplicateDocId: return "DuplicateDocId";
    case ErrorCode::kEmptyQueryId: return "EmptyQueryId";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kMissingDocument: return "MissingDocument";
    case ErrorCode::kMissingQuery: return "MissingQuery";
    case ErrorCode::kScriptMiss: return "ScriptMiss";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kUnparseableJudgment: return "UnparseableJudgment";
    case ErrorCode::kEmptyEvaluationSet: return "EmptyEvaluationSet";
    case ErrorCode::kZeroBaseline: return "ZeroBaseline";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kInconsistentRank: return "InconsistentRank";
    case ErrorCode::kCacheCorrupt: return "CacheCorrupt";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

bool is_backend_failure(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kScriptMiss:
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kTimeout:
    case ErrorCode::kUnparseableJudgment:
      return true;
    default:
      return false;
  }
}

}  // namespace car
