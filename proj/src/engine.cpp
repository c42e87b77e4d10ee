#include "car/engine.hpp"

#include <algorithm>

#include "car/errors.hpp"
#include "car/parallel.hpp"

namespace car {

ConfidenceEstimate estimate_confidence(const GeneratorInput& input, Generator& generator,
                                       const CarConfig& config) {
  validate(config);
  const auto samples = sample_answers(generator, input, config.k, config.decoding,
                                      config.answer_normalization, config.concurrency);
  const Judge judge = [&generator](std::string_view premise, std::string_view hypothesis) {
    return judge_entailment(generator, premise, hypothesis);
  };
  auto clusters = config.clustering_mode == ClusteringMode::kGreedy
                      ? cluster_greedy(samples, judge)
                      : cluster_pairwise(samples, judge,
                                         {config.pairwise_short_circuit, config.concurrency});
  auto confidence = confidence_from_clusters(clusters);
  return {confidence, std::move(clusters)};
}

BinLabel assign_bin(double c_qd, double c_q, double margin) {
  if (c_qd >= c_q + margin - kBoundaryTolerance) return BinLabel::kPromote;
  if (c_qd <= c_q - margin + kBoundaryTolerance) return BinLabel::kDemote;
  return BinLabel::kPreserve;
}

RankedCandidateList stable_bin_sort(const RankedCandidateList& list, const LabelMap& labels) {
  std::vector<std::pair<int, const RankedEntry*>> keyed;
  keyed.reserve(list.entries.size());
  for (const auto& entry : list.entries) {
    const auto it = labels.find(entry.doc_id);
    if (it == labels.end()) throw Error(ErrorCode::kMissingLabel, entry.doc_id);
    keyed.emplace_back(-to_int(it->second), &entry);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  RankedCandidateList out{list.query_id, {}};
  out.entries.reserve(keyed.size());
  for (const auto& [key, entry] : keyed) out.entries.push_back(*entry);
  return out;
}

bool passes_gate(const ConfidenceValue& c_q, const CarConfig& config) {
  return !config.disable_qt && c_q.value() >= config.query_threshold - kBoundaryTolerance;
}

namespace {

void require_documents(const RankedCandidateList& head, const DocumentStore& documents) {
  for (const auto& entry : head.entries)
    if (!documents.contains(entry.doc_id))
      throw Error(ErrorCode::kMissingDocument, head.query_id + " " + entry.doc_id);
}

}  // namespace

QueryMeasurement measure_query(const QueryRecord& query, const RankedCandidateList& list,
                               const DocumentStore& documents, Generator& generator,
                               const CarConfig& config, bool measure_documents) {
  validate(config);
  const auto head = truncate_scope(list, config.top_n).head;
  require_documents(head, documents);

  CountingGenerator counted(generator);
  QueryMeasurement out;
  out.query_id = query.query_id;
  out.c_q = estimate_confidence(GeneratorInput::query_only(query), counted, config).confidence;

  if (measure_documents || !passes_gate(out.c_q, config)) {
    // Document inputs are independent; the per-input work runs sequentially.
    CarConfig inner = config;
    inner.concurrency = 1;
    std::vector<ConfidenceValue> confidences(head.size());
    parallel_for(head.size(), config.concurrency, [&](std::size_t i) {
      const auto& doc = documents.at(head.entries[i].doc_id);
      confidences[i] =
          estimate_confidence(GeneratorInput::with_document(query, doc), counted, inner).confidence;
    });
    for (std::size_t i = 0; i < head.size(); ++i)
      out.document_confidences.emplace_back(head.entries[i].doc_id, confidences[i]);
    out.documents_measured = true;
  }
  out.sample_call_count = counted.sample_calls();
  out.judge_call_count = counted.judge_calls();
  return out;
}

RerankResult apply_correction(const QueryMeasurement& measurement,
                              const RankedCandidateList& list, const CarConfig& config) {
  RerankResult result{list, {}};
  auto& report = result.report;
  report.query_id = measurement.query_id;
  report.c_q = measurement.c_q;
  report.sample_call_count = measurement.sample_call_count;
  report.judge_call_count = measurement.judge_call_count;

  if (passes_gate(measurement.c_q, config)) {
    report.gated = true;
    return result;
  }
  if (!measurement.documents_measured)
    throw Error(ErrorCode::kInvalidArgument,
                "query " + measurement.query_id + " needs document confidences");

  const double c_q = measurement.c_q.value();
  const double margin = config.effective_margin();
  LabelMap labels;
  for (const auto& [doc_id, c_qd] : measurement.document_confidences) {
    const auto label = assign_bin(c_qd.value(), c_q, margin);
    labels.emplace(doc_id, label);
    report.per_doc.push_back(DocumentConfidence{doc_id, c_qd, c_qd.value() - c_q, label});
  }

  auto [head, tail] = truncate_scope(list, config.top_n);
  result.ranking = stable_bin_sort(head, labels);
  result.ranking.entries.insert(result.ranking.entries.end(), tail.entries.begin(),
                                tail.entries.end());
  return result;
}

RerankResult rerank_query(const QueryRecord& query, const RankedCandidateList& list,
                          const DocumentStore& documents, Generator& generator,
                          const CarConfig& config) {
  validate(config);
  validate_ranked_list(list);
  if (query.query_id != list.query_id)
    throw Error(ErrorCode::kInvalidArgument,
                "query " + query.query_id + " does not match list " + list.query_id);
  require_documents(truncate_scope(list, config.top_n).head, documents);

  try {
    return apply_correction(measure_query(query, list, documents, generator, config), list,
                            config);
  } catch (const Error& e) {
    if (!is_backend_failure(e.code())) throw;
    RerankResult fallback{list, {}};
    fallback.report.query_id = query.query_id;
    fallback.report.failed = true;
    fallback.report.error = e.what();
    return fallback;
  }
}

RankedCandidateList with_rank_scores(RankedCandidateList list) {
  const auto n = list.entries.size();
  for (std::size_t i = 0; i < n; ++i) list.entries[i].baseline_score = static_cast<double>(n - i);
  return list;
}

CorpusResult rerank_corpus(const std::vector<QueryRecord>& queries, const RunFile& baseline,
                           const DocumentStore& documents, Generator& generator,
                           const CarConfig& config) {
  std::unordered_map<std::string, const QueryRecord*> by_id;
  for (const auto& q : queries) by_id.emplace(q.query_id, &q);

  CorpusResult out;
  out.run.tag = config.run_tag;
  for (const auto& list : baseline.queries) {
    const auto it = by_id.find(list.query_id);
    if (it == by_id.end()) throw Error(ErrorCode::kMissingQuery, list.query_id);
    auto [ranking, report] = rerank_query(*it->second, list, documents, generator, config);
    if (report.failed) ++out.failed_queries;
    out.run.queries.push_back(with_rank_scores(std::move(ranking)));
    out.reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace car
