#include "car/domain.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_set>

#include "car/errors.hpp"

namespace car {

std::vector<std::string> RankedCandidateList::doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.doc_id);
  return ids;
}

bool is_valid(const ClusterAssignment& assignment) {
  const auto k = assignment.labels.size();
  const auto r = assignment.cluster_sizes.size();
  if (k == 0 || r == 0 || r > k) return false;
  std::vector<std::size_t> counted(r, 0);
  for (auto label : assignment.labels) {
    if (label >= r) return false;
    ++counted[label];
  }
  if (counted != assignment.cluster_sizes) return false;
  return std::all_of(counted.begin(), counted.end(), [](std::size_t n) { return n >= 1; }) &&
         std::accumulate(counted.begin(), counted.end(), std::size_t{0}) == k;
}

ConfidenceValue::ConfidenceValue(std::size_t largest_cluster, std::size_t sample_count)
    : largest_cluster_(largest_cluster), sample_count_(sample_count) {
  if (sample_count == 0 || largest_cluster == 0 || largest_cluster > sample_count) {
    throw Error(ErrorCode::kInvalidArgument,
                "confidence needs 1 <= largest_cluster <= sample_count, got " +
                    std::to_string(largest_cluster) + "/" + std::to_string(sample_count));
  }
}

std::string_view to_string(BinLabel label) {
  switch (label) {
    case BinLabel::kPromote: return "promote";
    case BinLabel::kPreserve: return "preserve";
    case BinLabel::kDemote: return "demote";
  }
  return "preserve";
}

std::string_view to_string(ClusteringMode mode) {
  return mode == ClusteringMode::kGreedy ? "greedy" : "pairwise";
}

std::string_view to_string(AnswerNormalization normalization) {
  return normalization == AnswerNormalization::kNone ? "none" : "trim_lower";
}

std::optional<ClusteringMode> parse_clustering_mode(std::string_view text) {
  if (text == "greedy") return ClusteringMode::kGreedy;
  if (text == "pairwise") return ClusteringMode::kPairwise;
  return std::nullopt;
}

std::optional<AnswerNormalization> parse_answer_normalization(std::string_view text) {
  if (text == "none") return AnswerNormalization::kNone;
  if (text == "trim_lower") return AnswerNormalization::kTrimLower;
  return std::nullopt;
}

void validate(const CarConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); };
  if (config.k < 2) fail("k must be >= 2");
  if (!(config.query_threshold >= 0.0 && config.query_threshold <= 1.0))
    fail("query threshold must lie in [0,1]");
  if (!(config.confidence_margin >= 0.0 && config.confidence_margin <= 1.0))
    fail("confidence margin must lie in [0,1]");
  if (config.top_n < 1) fail("top_n must be >= 1");
  if (config.concurrency < 1) fail("concurrency must be >= 1");
  if (config.decoding.max_tokens < 1) fail("max_tokens must be >= 1");
}

void validate(const QueryRecord& query) {
  if (query.query_id.empty()) throw Error(ErrorCode::kEmptyQueryId, "query record has no id");
  if (trim(query.text).empty())
    throw Error(ErrorCode::kInvalidArgument, "query " + query.query_id + " has blank text");
}

void validate_ranked_list(const RankedCandidateList& list) {
  if (list.query_id.empty()) throw Error(ErrorCode::kEmptyQueryId, "ranked list has no query id");
  std::unordered_set<std::string_view> seen;
  seen.reserve(list.entries.size());
  for (const auto& entry : list.entries) {
    if (entry.doc_id.empty())
      throw Error(ErrorCode::kInvalidArgument, "empty doc id in list for " + list.query_id);
    if (!seen.insert(entry.doc_id).second) throw Error(ErrorCode::kDuplicateDocId, entry.doc_id);
  }
}

ScopeSplit truncate_scope(const RankedCandidateList& list, std::size_t top_n) {
  if (top_n < 1) throw Error(ErrorCode::kInvalidArgument, "top_n must be >= 1");
  const auto cut = static_cast<std::ptrdiff_t>(std::min(top_n, list.entries.size()));
  ScopeSplit split{{list.query_id, {}}, {list.query_id, {}}};
  split.head.entries.assign(list.entries.begin(), list.entries.begin() + cut);
  split.tail.entries.assign(list.entries.begin() + cut, list.entries.end());
  return split;
}

std::string_view trim(std::string_view text) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

std::string normalize_answer(std::string_view text, AnswerNormalization normalization) {
  if (normalization == AnswerNormalization::kNone) return std::string(text);
  std::string out(trim(text));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace car
