#pragma once

// Confidence-aware reranking of one baseline permutation:
//   1. query-only confidence c_q
//   2. gate: keep the baseline when c_q >= T_q
//   3. per-document confidence c_{q,d} over the top_n head
//   4. bin each document against the band [c_q - m, c_q + m]
//   5. stable sort by bin, baseline order inside each bin

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "car/clustering.hpp"
#include "car/domain.hpp"
#include "car/generator.hpp"
#include "car/trec.hpp"

namespace car {

// Confidences are multiples of 1/k and thresholds usually multiples of 0.1,
// neither exact in binary; boundary comparisons allow this much slack.
inline constexpr double kBoundaryTolerance = 1e-9;

using DocumentStore = std::unordered_map<std::string, DocumentRecord>;
using LabelMap = std::unordered_map<std::string, BinLabel>;

struct ConfidenceEstimate {
  ConfidenceValue confidence;
  ClusterAssignment clusters;
};

// Samples k answers for `input`, clusters them per config.clustering_mode and
// returns the largest cluster share. Every call contributes k samples to
// `generator`; judge calls depend on the clustering mode.
ConfidenceEstimate estimate_confidence(const GeneratorInput& input, Generator& generator,
                                       const CarConfig& config);

// +1 if c_qd >= c_q + m, else -1 if c_qd <= c_q - m, else 0 (checked in that order).
BinLabel assign_bin(double c_qd, double c_q, double margin);

// Throws MissingLabel when a listed document has no label.
RankedCandidateList stable_bin_sort(const RankedCandidateList& list, const LabelMap& labels);

bool passes_gate(const ConfidenceValue& c_q, const CarConfig& config);

// Output of the (T_q, m)-independent stages 1 and 3 for one query.
struct QueryMeasurement {
  std::string query_id;
  ConfidenceValue c_q;
  bool documents_measured = false;
  // Head documents in baseline order.
  std::vector<std::pair<std::string, ConfidenceValue>> document_confidences;
  std::uint64_t sample_call_count = 0;
  std::uint64_t judge_call_count = 0;
};

// Runs stage 1 and, when `measure_documents` is set or the query fails the
// gate under `config`, stage 3.
QueryMeasurement measure_query(const QueryRecord& query, const RankedCandidateList& list,
                               const DocumentStore& documents, Generator& generator,
                               const CarConfig& config, bool measure_documents = false);

struct RerankResult {
  RankedCandidateList ranking;
  ConfidenceReport report;
};

// Stages 2, 4 and 5 against an existing measurement.
RerankResult apply_correction(const QueryMeasurement& measurement,
                              const RankedCandidateList& list, const CarConfig& config);

// Full pass for one query. Generator failures fail open: the baseline comes
// back unchanged and the report carries failed = true. A document missing
// from `documents` inside the top_n scope throws MissingDocument.
RerankResult rerank_query(const QueryRecord& query, const RankedCandidateList& list,
                          const DocumentStore& documents, Generator& generator,
                          const CarConfig& config);

struct CorpusResult {
  RunFile run;
  std::vector<ConfidenceReport> reports;
  std::size_t failed_queries = 0;
};

// Reranks every list of `baseline` independently. Output scores are the
// synthetic n, n-1, ... so the order is recoverable from scores alone.
CorpusResult rerank_corpus(const std::vector<QueryRecord>& queries, const RunFile& baseline,
                           const DocumentStore& documents, Generator& generator,
                           const CarConfig& config);

// Assigns the scores n, n-1, ..., 1 in list order.
RankedCandidateList with_rank_scores(RankedCandidateList list);

}  // namespace car
