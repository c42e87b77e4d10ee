#pragma once

// Shared value types for confidence-aware reranking. No IO, no generator calls.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace car {

struct QueryRecord {
  std::string query_id;
  std::string text;
};

struct DocumentRecord {
  std::string doc_id;
  std::string text;
};

struct RankedEntry {
  std::string doc_id;
  // Carried for provenance and run-file output; the engine reads only order.
  std::optional<double> baseline_score;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

// A permutation over candidate documents. Position in `entries` is the
// 0-based rank; external formats use 1-based ranks.
struct RankedCandidateList {
  std::string query_id;
  std::vector<RankedEntry> entries;

  std::size_t size() const noexcept { return entries.size(); }
  std::vector<std::string> doc_ids() const;

  friend bool operator==(const RankedCandidateList&, const RankedCandidateList&) = default;
};

struct AnswerSample {
  std::string text;
  std::size_t sample_index = 0;
};

// Semantic-cluster labels for one input's k samples. Cluster ids are
// contiguous 0..cluster_count-1 and numbered by smallest member index.
struct ClusterAssignment {
  std::vector<std::size_t> labels;
  std::vector<std::size_t> cluster_sizes;

  std::size_t cluster_count() const noexcept { return cluster_sizes.size(); }
  std::size_t sample_count() const noexcept { return labels.size(); }

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

bool is_valid(const ClusterAssignment& assignment);

// Largest-cluster proportion over k samples; always a point on {1/k, ..., 1}.
class ConfidenceValue {
 public:
  ConfidenceValue() = default;
  ConfidenceValue(std::size_t largest_cluster, std::size_t sample_count);

  double value() const noexcept {
    return static_cast<double>(largest_cluster_) / static_cast<double>(sample_count_);
  }
  std::size_t largest_cluster() const noexcept { return largest_cluster_; }
  std::size_t sample_count() const noexcept { return sample_count_; }

  friend bool operator==(const ConfidenceValue&, const ConfidenceValue&) = default;

 private:
  std::size_t largest_cluster_ = 1;
  std::size_t sample_count_ = 1;
};

enum class BinLabel : int { kDemote = -1, kPreserve = 0, kPromote = 1 };

std::string_view to_string(BinLabel label);
constexpr int to_int(BinLabel label) noexcept { return static_cast<int>(label); }

struct DocumentConfidence {
  std::string doc_id;
  ConfidenceValue c_qd;
  double delta = 0.0;  // c_qd - c_q, unrounded
  BinLabel label = BinLabel::kPreserve;
};

struct ConfidenceReport {
  std::string query_id;
  std::optional<ConfidenceValue> c_q;
  bool gated = false;
  bool failed = false;
  std::string error;
  std::vector<DocumentConfidence> per_doc;
  std::uint64_t judge_call_count = 0;
  std::uint64_t sample_call_count = 0;
};

enum class ClusteringMode { kGreedy, kPairwise };
enum class AnswerNormalization { kNone, kTrimLower };

std::string_view to_string(ClusteringMode mode);
std::string_view to_string(AnswerNormalization normalization);
std::optional<ClusteringMode> parse_clustering_mode(std::string_view text);
std::optional<AnswerNormalization> parse_answer_normalization(std::string_view text);

struct DecodingParams {
  double temperature = 1.0;
  int max_tokens = 64;

  friend bool operator==(const DecodingParams&, const DecodingParams&) = default;
};

struct CarConfig {
  std::size_t k = 10;
  double query_threshold = 0.8;
  double confidence_margin = 0.2;
  std::size_t top_n = 10;
  ClusteringMode clustering_mode = ClusteringMode::kGreedy;
  bool disable_qt = false;
  bool disable_cm = false;
  DecodingParams decoding{};
  double judge_temperature = 0.0;
  AnswerNormalization answer_normalization = AnswerNormalization::kTrimLower;
  // Short-circuit the reverse entailment direction in pairwise mode.
  bool pairwise_short_circuit = false;
  // Upper bound on concurrently issued generator jobs within one query.
  std::size_t concurrency = 1;
  std::string run_tag = "car";

  double effective_margin() const noexcept { return disable_cm ? 0.0 : confidence_margin; }
};

// Throws Error(kInvalidArgument) when an invariant does not hold.
void validate(const CarConfig& config);

// Throws EmptyQueryId or InvalidArgument on a blank query text.
void validate(const QueryRecord& query);

// Throws DuplicateDocId or EmptyQueryId.
void validate_ranked_list(const RankedCandidateList& list);

struct ScopeSplit {
  RankedCandidateList head;
  RankedCandidateList tail;
};

ScopeSplit truncate_scope(const RankedCandidateList& list, std::size_t top_n);

std::string normalize_answer(std::string_view text, AnswerNormalization normalization);
std::string_view trim(std::string_view text);

}  // namespace car
