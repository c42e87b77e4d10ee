#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace car {

enum class ErrorCode {
  kInvalidArgument,
  kDuplicateDocId,
  kEmptyQueryId,
  kMissingLabel,
  kMissingDocument,
  kMissingQuery,
  kScriptMiss,
  kBackendUnavailable,
  kTimeout,
  kUnparseableJudgment,
  kEmptyEvaluationSet,
  kZeroBaseline,
  kMalformedLine,
  kInconsistentRank,
  kCacheCorrupt,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Failures of the generator side. The engine fails open on these.
bool is_backend_failure(ErrorCode code) noexcept;

}  // namespace car
