#pragma once

#include <cstddef>
#include <vector>

#include "car/engine.hpp"
#include "car/trec.hpp"

namespace car {

struct SweepGrid {
  std::vector<double> query_thresholds;
  std::vector<double> margins;

  // {0, 0.1, ..., 1.0} on both axes.
  static SweepGrid defaults();
};

struct SweepCell {
  double query_threshold = 0.0;
  double margin = 0.0;
  double ndcg = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // threshold-major, in grid order
  SweepCell best;                // first cell attaining the maximum
  double baseline_ndcg = 0.0;
  std::size_t failed_queries = 0;
};

// Measures every query once (stage 1, plus stage 3 whenever some grid
// threshold would correct the query) and replays gating, binning and sorting
// per cell, so the generator sees each distinct input at most once.
SweepResult sweep(const std::vector<QueryRecord>& queries, const RunFile& baseline,
                  const DocumentStore& documents, const QrelsTable& qrels, Generator& generator,
                  const CarConfig& config, const SweepGrid& grid, std::size_t eval_k = 5);

}  // namespace car
