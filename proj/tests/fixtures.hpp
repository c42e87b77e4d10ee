#pragma once

// Scripted scenarios shared by the unit, command and acceptance tests.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "car/domain.hpp"
#include "car/engine.hpp"
#include "car/scripted_generator.hpp"
#include "car/trec.hpp"
#include "json.hpp"

namespace car_test {

inline std::vector<std::string> repeat(const std::string& answer, std::size_t k) {
  return std::vector<std::string>(k, answer);
}

// k pairwise distinct answers.
inline std::vector<std::string> dispersed(const std::string& stem, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(stem + "-" + std::to_string(i));
  return out;
}

// `majority` copies of `answer`, the rest distinct.
inline std::vector<std::string> with_majority(const std::string& answer, std::size_t majority,
                                              std::size_t k, const std::string& stem) {
  auto out = repeat(answer, majority);
  for (std::size_t i = majority; i < k; ++i) out.push_back(stem + "-" + std::to_string(i));
  return out;
}

inline std::string doc_key(const std::string& qid, const std::string& docid) {
  return qid + '\t' + docid;
}

// A random instance with an equivalence-class judge. The oracle side only
// sees `answers_by_key`, `class_of` and the scalar settings.
struct RandomInstance {
  car::QueryRecord query;
  car::RankedCandidateList list;
  car::DocumentStore documents;
  car::SampleScript samples;
  car::EntailmentScript entailment;
  car::CarConfig config;
  std::map<std::string, int> class_of;  // normalized answer -> class
  int threshold_tenths = 0;
  int margin_tenths = 0;
};

inline RandomInstance make_random_instance(std::mt19937_64& rng, std::size_t max_docs = 8,
                                           std::size_t min_k = 2, std::size_t max_k = 6) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };

  RandomInstance inst;
  inst.query = {"q" + std::to_string(pick(0, 999)), "random query"};
  const std::size_t k = pick(min_k, max_k);
  const std::size_t n = pick(0, max_docs);

  // Base letters grouped into random classes; surface variants exercise
  // normalization; the blank answer is its own class.
  const std::size_t letters = pick(1, 6);
  std::vector<std::string> surfaces = {""};
  inst.class_of[""] = -1;
  const int class_count = static_cast<int>(pick((letters + 1) / 2, letters));
  for (std::size_t i = 0; i < letters; ++i) {
    const std::string base(1, static_cast<char>('a' + i));
    inst.class_of[base] = static_cast<int>(pick(0, static_cast<std::size_t>(class_count - 1)));
    surfaces.push_back(base);
    surfaces.push_back(std::string(1, static_cast<char>('A' + i)));
    surfaces.push_back(" " + base + " ");
  }
  for (const auto& [a, ca] : inst.class_of) {
    for (const auto& [b, cb] : inst.class_of) {
      if (a.empty() || b.empty()) continue;
      inst.entailment.pairs[{a, b}] =
          ca == cb ? car::EntailmentVerdict::kEntails : car::EntailmentVerdict::kNotEntails;
    }
  }

  // Letters come from a random prefix per input, so both unanimous and
  // scattered answer sets occur; each letter has three surface variants.
  auto draw_answers = [&] {
    std::vector<std::string> out;
    const std::size_t span = pick(1, letters);
    for (std::size_t i = 0; i < k; ++i) {
      if (pick(0, 19) == 0) {
        out.push_back(pick(0, 1) ? "" : "  ");
      } else {
        out.push_back(surfaces[1 + 3 * pick(0, span - 1) + pick(0, 2)]);
      }
    }
    return out;
  };

  inst.samples[inst.query.query_id] = draw_answers();
  inst.list.query_id = inst.query.query_id;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string id = "d" + std::to_string(i) + "-" + std::to_string(pick(0, 99));
    bool dup = false;
    for (const auto& e : inst.list.entries) dup = dup || e.doc_id == id;
    if (dup) continue;
    inst.list.entries.push_back({id, std::nullopt});
    inst.documents[id] = {id, "text of " + id};
    inst.samples[doc_key(inst.query.query_id, id)] = draw_answers();
  }
  std::shuffle(inst.list.entries.begin(), inst.list.entries.end(), rng);

  inst.threshold_tenths = static_cast<int>(pick(0, 10));
  inst.margin_tenths = static_cast<int>(pick(0, 10));
  inst.config.k = k;
  inst.config.query_threshold = inst.threshold_tenths / 10.0;
  inst.config.confidence_margin = inst.margin_tenths / 10.0;
  inst.config.top_n = pick(1, 10);
  inst.config.clustering_mode = pick(0, 1) ? car::ClusteringMode::kGreedy
                                           : car::ClusteringMode::kPairwise;
  inst.config.disable_qt = pick(0, 4) == 0;
  inst.config.disable_cm = pick(0, 4) == 0;
  return inst;
}

// Ten queries with ten documents each. Relevant documents (grade 1) yield
// unanimous answers, irrelevant ones fully dispersed answers, query-only
// sampling gives c_q = 3/10, and the baseline lists every irrelevant
// document ahead of every relevant one.
struct LiftFixture {
  std::vector<car::QueryRecord> queries;
  car::DocumentStore documents;
  car::RunFile baseline;
  car::QrelsTable qrels;
  car::SampleScript samples;
  std::vector<std::vector<int>> baseline_grades;  // per query, in baseline order
  std::string noisy_doc;                          // set by add_noise
  std::string noisy_query;
};

inline LiftFixture make_lift_fixture(std::size_t k = 10) {
  LiftFixture fx;
  fx.baseline.tag = "baseline";
  for (int q = 0; q < 10; ++q) {
    const std::string qid = "q" + std::to_string(q);
    fx.queries.push_back({qid, "question number " + std::to_string(q)});
    fx.samples[qid] = {"a", "a", "a", "b", "b", "b", "c", "c", "d", "e"};
    fx.samples[qid].resize(k, "f");

    const int relevant = 5 + q % 4;
    car::RankedCandidateList list{qid, {}};
    std::vector<int> grades;
    // Ideal order has docs 0..relevant-1 first; the baseline reverses it.
    for (int d = 9; d >= 0; --d) {
      const std::string docid = qid + "-d" + std::to_string(d);
      const bool is_relevant = d < relevant;
      fx.documents[docid] = {docid, "passage " + docid};
      fx.qrels.set(qid, docid, is_relevant ? 1 : 0);
      fx.samples[doc_key(qid, docid)] =
          is_relevant ? repeat("answer " + qid, k) : dispersed("noise " + docid, k);
      list.entries.push_back({docid, static_cast<double>(d + 1)});
      grades.push_back(is_relevant ? 1 : 0);
    }
    fx.baseline.queries.push_back(std::move(list));
    fx.baseline_grades.push_back(std::move(grades));
  }
  return fx;
}

// One irrelevant document of q0 gets c_qd = c_q + m/2 = 0.4 (k = 10).
inline void add_noise(LiftFixture& fx) {
  fx.noisy_query = "q0";
  fx.noisy_doc = "q0-d9";
  fx.samples[doc_key("q0", "q0-d9")] = with_majority("fluke", 4, 10, "noise q0-d9");
}

inline car::CarConfig lift_config() {
  car::CarConfig config;
  config.k = 10;
  config.query_threshold = 0.8;
  config.confidence_margin = 0.2;
  config.top_n = 10;
  return config;
}

// Scripted-backend JSON for `samples` with the equality judge.
inline std::string script_json(const car::SampleScript& samples, const std::string& model) {
  auto entries = nlohmann::json::array();
  std::map<std::string, std::vector<std::string>> ordered(samples.begin(), samples.end());
  for (const auto& [key, answers] : ordered) {
    const auto tab = key.find('\t');
    nlohmann::json entry = {{"query_id", key.substr(0, tab)}, {"answers", answers}};
    if (tab != std::string::npos) entry["doc_id"] = key.substr(tab + 1);
    entries.push_back(std::move(entry));
  }
  return nlohmann::json{{"model", model}, {"samples", entries}, {"entailment", "equality"}}.dump(1);
}

struct FixtureFiles {
  std::filesystem::path dir;
  std::filesystem::path queries, corpus, baseline, qrels, script;
};

// Writes the lift fixture in the on-disk formats the CLI reads.
inline FixtureFiles write_fixture_files(const LiftFixture& fx, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  FixtureFiles files{dir, dir / "queries.tsv", dir / "corpus.tsv", dir / "baseline.run",
                     dir / "qrels.txt", dir / "script.json"};
  {
    std::ofstream out(files.queries);
    for (const auto& q : fx.queries) out << q.query_id << '\t' << q.text << '\n';
  }
  {
    std::ofstream out(files.corpus);
    std::map<std::string, std::string> ordered;
    for (const auto& [id, doc] : fx.documents) ordered[id] = doc.text;
    for (const auto& [id, text] : ordered) out << id << '\t' << text << '\n';
  }
  {
    std::ofstream out(files.baseline);
    car::write_run(fx.baseline, out);
  }
  {
    std::ofstream out(files.qrels);
    for (const auto& list : fx.baseline.queries)
      for (const auto& e : list.entries)
        out << list.query_id << " 0 " << e.doc_id << ' ' << fx.qrels.grade(list.query_id, e.doc_id)
            << '\n';
  }
  {
    std::ofstream out(files.script);
    out << script_json(fx.samples, "lift-script");
  }
  return files;
}

}  // namespace car_test
