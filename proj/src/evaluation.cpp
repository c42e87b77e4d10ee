#include "car/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "car/errors.hpp"

namespace car {

const double* MetricReport::value_for(std::string_view query_id) const {
  for (const auto& [qid, value] : per_query)
    if (qid == query_id) return &value;
  return nullptr;
}

double dcg_at_k(std::span<const int> grades, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  double dcg = 0.0;
  const auto depth = std::min(k, grades.size());
  for (std::size_t i = 0; i < depth; ++i) {
    const double gain = std::exp2(static_cast<double>(grades[i])) - 1.0;
    dcg += gain / std::log2(static_cast<double>(i + 2));
  }
  return dcg;
}

MetricReport ndcg_at_k(const RunFile& run, const QrelsTable& qrels, std::size_t k,
                       const std::vector<std::string>& only) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const std::unordered_set<std::string> allowed(only.begin(), only.end());

  MetricReport report{"ndcg", k, {}, 0.0};
  for (const auto& list : run.queries) {
    if (!allowed.empty() && !allowed.contains(list.query_id)) continue;
    if (!qrels.has_relevant(list.query_id)) continue;

    std::vector<int> ranked;
    ranked.reserve(std::min(k, list.entries.size()));
    for (std::size_t i = 0; i < list.entries.size() && i < k; ++i)
      ranked.push_back(qrels.grade(list.query_id, list.entries[i].doc_id));

    auto ideal = qrels.judged_grades(list.query_id);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    report.per_query.emplace_back(list.query_id, dcg_at_k(ranked, k) / dcg_at_k(ideal, k));
  }
  if (report.per_query.empty())
    throw Error(ErrorCode::kEmptyEvaluationSet, "no evaluated query has a relevant document");

  double sum = 0.0;
  for (const auto& [qid, value] : report.per_query) sum += value;
  report.mean = sum / static_cast<double>(report.per_query.size());
  return report;
}

namespace {

std::vector<std::string> tokens_of(std::string_view text) {
  std::istringstream in(normalize_answer(text, AnswerNormalization::kTrimLower));
  std::vector<std::string> tokens;
  for (std::string token; in >> token;) tokens.push_back(std::move(token));
  return tokens;
}

}  // namespace

double token_f1(std::string_view predicted, std::string_view gold, TokenOverlap overlap) {
  auto pred = tokens_of(predicted);
  auto ref = tokens_of(gold);
  if (overlap == TokenOverlap::kSet) {
    for (auto* v : {&pred, &ref}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
  }
  if (pred.empty() || ref.empty()) return 0.0;

  std::map<std::string, int> remaining;
  for (const auto& t : ref) ++remaining[t];
  std::size_t common = 0;
  for (const auto& t : pred) {
    if (auto it = remaining.find(t); it != remaining.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(ref.size());
  return 2.0 * precision * recall / (precision + recall);
}

double relative_improvement(double baseline, double treatment) {
  if (!(baseline > 0.0))
    throw Error(ErrorCode::kZeroBaseline, "baseline score must be positive");
  return (treatment - baseline) / baseline * 100.0;
}

}  // namespace car
