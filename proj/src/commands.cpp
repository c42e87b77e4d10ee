#include "car/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "car/cache.hpp"
#include "car/errors.hpp"
#include "car/evaluation.hpp"
#include "car/records.hpp"
#include "car/trec.hpp"

namespace car {

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

// Wraps `backend` in a cache when a directory is configured.
class BackendStack {
 public:
  BackendStack(Generator& backend, const std::optional<std::filesystem::path>& cache_dir)
      : backend_(backend) {
    if (cache_dir) {
      cache_ = std::make_unique<ResponseCache>(*cache_dir);
      caching_ = std::make_unique<CachingGenerator>(backend, *cache_);
    }
  }

  Generator& top() { return caching_ ? static_cast<Generator&>(*caching_) : backend_; }

 private:
  Generator& backend_;
  std::unique_ptr<ResponseCache> cache_;
  std::unique_ptr<CachingGenerator> caching_;
};

}  // namespace

nlohmann::json report_to_json(const ConfidenceReport& report) {
  nlohmann::json out = {
      {"query_id", report.query_id},
      {"gated", report.gated},
      {"failed", report.failed},
      {"judge_call_count", report.judge_call_count},
      {"sample_call_count", report.sample_call_count},
  };
  if (report.c_q) {
    out["c_q"] = report.c_q->value();
    out["c_q_fraction"] = std::to_string(report.c_q->largest_cluster()) + "/" +
                          std::to_string(report.c_q->sample_count());
  } else {
    out["c_q"] = nullptr;
  }
  if (report.failed) out["error"] = report.error;
  auto per_doc = nlohmann::json::array();
  for (const auto& doc : report.per_doc) {
    per_doc.push_back({
        {"doc_id", doc.doc_id},
        {"c_qd", doc.c_qd.value()},
        {"delta", doc.delta},
        {"label", to_int(doc.label)},
    });
  }
  out["per_doc"] = std::move(per_doc);
  return out;
}

RerankSummary run_rerank(const RerankRequest& request, Generator& backend) {
  validate(request.settings);
  const auto queries = read_queries(request.queries);
  const auto documents = read_corpus(request.corpus);
  const auto baseline = read_run_file(request.run.string());

  BackendStack stack(backend, request.cache_dir);
  const auto result =
      rerank_corpus(queries, baseline, documents, stack.top(), request.settings.car);

  RerankSummary summary;
  summary.queries = result.reports.size();
  summary.failed = result.failed_queries;
  auto reports = nlohmann::json::array();
  for (const auto& r : result.reports) {
    if (r.gated) ++summary.gated;
    if (!r.gated && !r.failed) ++summary.corrected;
    reports.push_back(report_to_json(r));
  }

  const auto config_lines = describe(request.settings);
  std::ostringstream run_text;
  write_run(result.run, run_text, config_lines);

  nlohmann::json config = nlohmann::json::object();
  for (const auto& line : config_lines) {
    const auto eq = line.find('=');
    config[line.substr(0, eq)] = line.substr(eq + 1);
  }
  const nlohmann::json report_doc = {
      {"config", config},
      {"queries", reports},
      {"summary",
       {{"queries", summary.queries},
        {"gated", summary.gated},
        {"corrected", summary.corrected},
        {"failed", summary.failed}}},
  };

  summary.run_path = request.out;
  summary.report_path = request.report.empty()
                            ? std::filesystem::path(request.out.string() + ".report.json")
                            : request.report;
  write_file(summary.run_path, run_text.str());
  write_file(summary.report_path, report_doc.dump(2) + "\n");
  return summary;
}

void run_evaluate(const EvaluateRequest& request, std::ostream& csv, std::ostream& warnings) {
  if (request.runs.empty()) throw Error(ErrorCode::kInvalidArgument, "no run files given");
  const auto qrels = read_qrels_file(request.qrels.string());

  std::vector<RunFile> runs;
  std::vector<std::string> names;
  for (const auto& path : request.runs) {
    runs.push_back(read_run_file(path.string()));
    names.push_back(path.filename().string());
  }

  // Intersection of query ids across runs, in baseline order.
  std::vector<std::string> common;
  for (const auto& qid : runs.front().query_ids()) {
    bool everywhere = std::all_of(runs.begin() + 1, runs.end(),
                                  [&](const RunFile& r) { return r.find(qid) != nullptr; });
    if (everywhere) common.push_back(qid);
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto ids = runs[i].query_ids();
    const auto extra = std::count_if(ids.begin(), ids.end(), [&](const std::string& id) {
      return std::find(common.begin(), common.end(), id) == common.end();
    });
    if (extra > 0) {
      warnings << "warning: " << names[i] << " has " << extra
               << " queries outside the common query set; evaluating the intersection\n";
    }
  }
  if (common.empty())
    throw Error(ErrorCode::kEmptyEvaluationSet, "runs share no queries");

  std::vector<MetricReport> reports;
  for (const auto& run : runs) reports.push_back(ndcg_at_k(run, qrels, request.k, common));

  std::ostringstream out;
  out << "# metric=ndcg k=" << request.k << " baseline=" << names.front() << '\n';
  out << "run,query_id,ndcg@" << request.k << ",delta_pct\n";
  const auto& base = reports.front();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& [qid, value] : reports[i].per_query) {
      out << names[i] << ',' << qid << ',' << fixed6(value) << ',';
      const double* b = base.value_for(qid);
      if (b && *b > 0.0) out << fixed6(relative_improvement(*b, value));
      out << '\n';
    }
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    out << names[i] << ",all," << fixed6(reports[i].mean) << ',';
    if (base.mean > 0.0) out << fixed6(relative_improvement(base.mean, reports[i].mean));
    out << '\n';
  }

  if (request.out.empty()) {
    csv << out.str();
  } else {
    write_file(request.out, out.str());
  }
}

SweepResult run_sweep(const SweepRequest& request, Generator& backend) {
  validate(request.settings);
  const auto queries = read_queries(request.queries);
  const auto documents = read_corpus(request.corpus);
  const auto baseline = read_run_file(request.run.string());
  const auto qrels = read_qrels_file(request.qrels.string());

  BackendStack stack(backend, request.cache_dir);
  const auto k = request.settings.eval_k;
  auto result = sweep(queries, baseline, documents, qrels, stack.top(), request.settings.car,
                      request.grid, k);

  std::ostringstream out;
  for (const auto& line : describe(request.settings)) out << "# " << line << '\n';
  out << "# baseline ndcg@" << k << '=' << fixed6(result.baseline_ndcg) << '\n';
  out << "qt,cm,ndcg@" << k << '\n';
  for (const auto& cell : result.cells) {
    out << format_real(cell.query_threshold) << ',' << format_real(cell.margin) << ','
        << fixed6(cell.ndcg) << '\n';
  }
  out << "# argmax qt=" << format_real(result.best.query_threshold)
      << " cm=" << format_real(result.best.margin) << " ndcg@" << k << '='
      << fixed6(result.best.ndcg) << '\n';
  write_file(request.out, out.str());
  return result;
}

}  // namespace car
