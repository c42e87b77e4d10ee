#pragma once

// Library side of the `car` command-line tool. Each command takes the
// generator explicitly so callers (and tests) control the backend.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "car/engine.hpp"
#include "car/settings.hpp"
#include "car/sweep.hpp"

#include "json.hpp"

namespace car {

struct RerankRequest {
  Settings settings;
  std::filesystem::path queries;
  std::filesystem::path corpus;
  std::filesystem::path run;
  std::filesystem::path out;
  std::filesystem::path report;  // empty: <out>.report.json
  std::optional<std::filesystem::path> cache_dir;
};

struct RerankSummary {
  std::size_t queries = 0;
  std::size_t gated = 0;
  std::size_t corrected = 0;
  std::size_t failed = 0;
  std::filesystem::path run_path;
  std::filesystem::path report_path;
};

// Writes the reranked run (TREC, config echoed as '#' header lines) and a
// JSON report with one ConfidenceReport per query.
RerankSummary run_rerank(const RerankRequest& request, Generator& backend);

struct EvaluateRequest {
  std::filesystem::path qrels;
  std::vector<std::filesystem::path> runs;  // the first run is the baseline
  std::size_t k = 5;
  std::filesystem::path out;  // empty: write to the stream passed in
};

// CSV columns: run,query_id,ndcg@k,delta_pct. Per-query rows are followed by
// one summary row per run (query_id "all"). Delta is relative to the
// baseline; it is left blank where the baseline scores 0. Queries missing
// from some run are reported on `warnings` and only the intersection is
// evaluated.
void run_evaluate(const EvaluateRequest& request, std::ostream& csv, std::ostream& warnings);

struct SweepRequest {
  Settings settings;
  std::filesystem::path queries;
  std::filesystem::path corpus;
  std::filesystem::path run;
  std::filesystem::path qrels;
  std::filesystem::path out;
  SweepGrid grid = SweepGrid::defaults();
  std::optional<std::filesystem::path> cache_dir;
};

// Writes qt,cm,ndcg@k rows and an argmax comment line.
SweepResult run_sweep(const SweepRequest& request, Generator& backend);

nlohmann::json report_to_json(const ConfidenceReport& report);

}  // namespace car
