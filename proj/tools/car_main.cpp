// car: confidence-aware reranking from the command line.
//
//   car rerank   --config c.conf --queries q.tsv --corpus docs.tsv --run base.run --out car.run
//   car evaluate --qrels qrels.txt --run base.run --run car.run --k 5
//   car sweep    --config c.conf --queries q.tsv --corpus docs.tsv --run base.run
//                --qrels qrels.txt --out grid.csv

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "car/commands.hpp"
#include "car/errors.hpp"
#include "car/settings.hpp"

namespace {

struct CarOverrides {
  std::string config;
  std::optional<std::size_t> k;
  std::optional<std::string> qt;
  std::optional<std::string> cm;
  std::optional<std::size_t> top_n;
  std::optional<std::string> mode;
  bool disable_qt = false;
  bool disable_cm = false;
  std::optional<std::string> backend;
  std::string cache_dir;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "key=value configuration file");
    app.add_option("--k", k, "samples per input");
    app.add_option("--qt", qt, "query threshold T_q in [0,1]");
    app.add_option("--cm", cm, "confidence margin m in [0,1]");
    app.add_option("--top-n", top_n, "rerank scope");
    app.add_option("--mode", mode, "clustering mode")->check(CLI::IsMember({"greedy", "pairwise"}));
    app.add_flag("--disable-qt", disable_qt, "ablation: correct every query");
    app.add_flag("--disable-cm", disable_cm, "ablation: margin 0");
    app.add_option("--backend", backend, "generator backend")
        ->check(CLI::IsMember({"scripted", "http"}));
    app.add_option("--cache-dir", cache_dir, "sample/judgment cache directory");
  }

  car::Settings resolve() const {
    car::Settings s = config.empty() ? car::Settings{} : car::load_settings(config);
    if (k) car::apply_setting(s, "k", std::to_string(*k));
    if (qt) car::apply_setting(s, "qt", *qt);
    if (cm) car::apply_setting(s, "cm", *cm);
    if (top_n) car::apply_setting(s, "top_n", std::to_string(*top_n));
    if (mode) car::apply_setting(s, "mode", *mode);
    if (disable_qt) s.car.disable_qt = true;
    if (disable_cm) s.car.disable_cm = true;
    if (backend) car::apply_setting(s, "backend", *backend);
    car::validate(s);
    return s;
  }

  std::optional<std::filesystem::path> cache() const {
    if (cache_dir.empty()) return std::nullopt;
    return std::filesystem::path(cache_dir);
  }
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    car::Settings scratch;
    car::apply_setting(scratch, "qt", std::string(car::trim(item)));
    values.push_back(scratch.car.query_threshold);
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-aware reranking toolkit"};
  app.require_subcommand(1);

  CarOverrides rerank_opts;
  std::string rerank_queries, rerank_corpus, rerank_run, rerank_out, rerank_report;
  auto* rerank_cmd = app.add_subcommand("rerank", "rerank a baseline run");
  rerank_opts.attach(*rerank_cmd);
  rerank_cmd->add_option("--queries", rerank_queries, "queries file (id<TAB>text)")->required();
  rerank_cmd->add_option("--corpus", rerank_corpus, "corpus file (id<TAB>text)")->required();
  rerank_cmd->add_option("--run", rerank_run, "baseline TREC run")->required();
  rerank_cmd->add_option("--out", rerank_out, "output TREC run")->required();
  rerank_cmd->add_option("--report", rerank_report, "report JSON (default <out>.report.json)");

  std::string eval_qrels, eval_out;
  std::vector<std::string> eval_runs;
  std::size_t eval_k = 5;
  auto* eval_cmd = app.add_subcommand("evaluate", "NDCG@k and relative improvement");
  eval_cmd->add_option("--qrels", eval_qrels, "TREC qrels")->required();
  eval_cmd->add_option("--run", eval_runs, "run files; the first is the baseline")->required();
  eval_cmd->add_option("--k", eval_k, "NDCG cutoff")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", eval_out, "CSV output (default stdout)");

  CarOverrides sweep_opts;
  std::string sweep_queries, sweep_corpus, sweep_run, sweep_qrels, sweep_out, qt_grid, cm_grid;
  auto* sweep_cmd = app.add_subcommand("sweep", "grid search over T_q and m");
  sweep_opts.attach(*sweep_cmd);
  sweep_cmd->add_option("--queries", sweep_queries)->required();
  sweep_cmd->add_option("--corpus", sweep_corpus)->required();
  sweep_cmd->add_option("--run", sweep_run)->required();
  sweep_cmd->add_option("--qrels", sweep_qrels)->required();
  sweep_cmd->add_option("--out", sweep_out, "grid CSV")->required();
  sweep_cmd->add_option("--qt-grid", qt_grid, "comma-separated T_q values (default 0,0.1,...,1)");
  sweep_cmd->add_option("--cm-grid", cm_grid, "comma-separated m values (default 0,0.1,...,1)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rerank_cmd) {
      car::RerankRequest request;
      request.settings = rerank_opts.resolve();
      request.queries = rerank_queries;
      request.corpus = rerank_corpus;
      request.run = rerank_run;
      request.out = rerank_out;
      request.report = rerank_report;
      request.cache_dir = rerank_opts.cache();
      auto backend = car::make_generator(request.settings);
      const auto summary = car::run_rerank(request, *backend);
      std::cerr << "queries=" << summary.queries << " gated=" << summary.gated
                << " corrected=" << summary.corrected << " failed=" << summary.failed << '\n';
    } else if (*eval_cmd) {
      car::EvaluateRequest request;
      request.qrels = eval_qrels;
      request.runs.assign(eval_runs.begin(), eval_runs.end());
      request.k = eval_k;
      request.out = eval_out;
      car::run_evaluate(request, std::cout, std::cerr);
    } else if (*sweep_cmd) {
      car::SweepRequest request;
      request.settings = sweep_opts.resolve();
      request.queries = sweep_queries;
      request.corpus = sweep_corpus;
      request.run = sweep_run;
      request.qrels = sweep_qrels;
      request.out = sweep_out;
      request.cache_dir = sweep_opts.cache();
      if (!qt_grid.empty()) request.grid.query_thresholds = parse_grid(qt_grid);
      if (!cm_grid.empty()) request.grid.margins = parse_grid(cm_grid);
      auto backend = car::make_generator(request.settings);
      const auto result = car::run_sweep(request, *backend);
      std::cerr << "best qt=" << car::format_real(result.best.query_threshold)
                << " cm=" << car::format_real(result.best.margin) << " ndcg="
                << result.best.ndcg << " (baseline " << result.baseline_ndcg << ")\n";
    }
  } catch (const car::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
