#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "car/trec.hpp"

namespace car {

struct MetricReport {
  std::string metric;
  std::size_t k = 0;
  std::vector<std::pair<std::string, double>> per_query;  // in run order
  double mean = 0.0;

  const double* value_for(std::string_view query_id) const;
};

// Sum over the first min(k, n) positions of (2^rel - 1) / log2(i + 1), i 1-based.
double dcg_at_k(std::span<const int> grades, std::size_t k);

// Per-query DCG@k / IDCG@k, where IDCG sorts every judged grade of the query.
// Queries without a relevant judgment are left out of the report. When
// `only` is non-empty, evaluation is restricted to those query ids.
// Throws EmptyEvaluationSet if nothing remains.
MetricReport ndcg_at_k(const RunFile& run, const QrelsTable& qrels, std::size_t k,
                       const std::vector<std::string>& only = {});

enum class TokenOverlap { kSet, kBag };

// Token F1 over whitespace tokens of the trimmed, lowercased strings.
double token_f1(std::string_view predicted, std::string_view gold,
                TokenOverlap overlap = TokenOverlap::kSet);

// (treatment - baseline) / baseline * 100. Throws ZeroBaseline if baseline <= 0.
double relative_improvement(double baseline, double treatment);

}  // namespace car
