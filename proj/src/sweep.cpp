#include "car/sweep.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>

#include "car/errors.hpp"
#include "car/evaluation.hpp"

namespace car {

SweepGrid SweepGrid::defaults() {
  SweepGrid grid;
  for (int i = 0; i <= 10; ++i) {
    grid.query_thresholds.push_back(i / 10.0);
    grid.margins.push_back(i / 10.0);
  }
  return grid;
}

SweepResult sweep(const std::vector<QueryRecord>& queries, const RunFile& baseline,
                  const DocumentStore& documents, const QrelsTable& qrels, Generator& generator,
                  const CarConfig& config, const SweepGrid& grid, std::size_t eval_k) {
  if (grid.query_thresholds.empty() || grid.margins.empty())
    throw Error(ErrorCode::kInvalidArgument, "sweep grid has an empty axis");
  for (double v : grid.query_thresholds)
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "T_q outside [0,1]");
  for (double v : grid.margins)
    if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "margin outside [0,1]");

  std::unordered_map<std::string, const QueryRecord*> by_id;
  for (const auto& q : queries) by_id.emplace(q.query_id, &q);

  // Stage 3 is needed whenever the loosest threshold on the grid corrects.
  CarConfig measure_config = config;
  measure_config.query_threshold =
      *std::max_element(grid.query_thresholds.begin(), grid.query_thresholds.end());

  SweepResult result;
  std::vector<std::optional<QueryMeasurement>> measurements;
  for (const auto& list : baseline.queries) {
    validate_ranked_list(list);
    const auto it = by_id.find(list.query_id);
    if (it == by_id.end()) throw Error(ErrorCode::kMissingQuery, list.query_id);
    try {
      measurements.emplace_back(
          measure_query(*it->second, list, documents, generator, measure_config));
    } catch (const Error& e) {
      if (!is_backend_failure(e.code())) throw;
      measurements.emplace_back(std::nullopt);
      ++result.failed_queries;
    }
  }

  result.baseline_ndcg = ndcg_at_k(baseline, qrels, eval_k).mean;

  bool first = true;
  for (double threshold : grid.query_thresholds) {
    for (double margin : grid.margins) {
      CarConfig cell = config;
      cell.query_threshold = threshold;
      cell.confidence_margin = margin;
      RunFile run{config.run_tag, {}};
      for (std::size_t q = 0; q < baseline.queries.size(); ++q) {
        const auto& list = baseline.queries[q];
        run.queries.push_back(measurements[q]
                                  ? apply_correction(*measurements[q], list, cell).ranking
                                  : list);
      }
      const SweepCell scored{threshold, margin, ndcg_at_k(run, qrels, eval_k).mean};
      result.cells.push_back(scored);
      if (first || scored.ndcg > result.best.ndcg) result.best = scored;
      first = false;
    }
  }
  return result;
}

}  // namespace car
