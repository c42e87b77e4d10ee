#pragma once

// TREC qrels/run interchange.
//   qrels line: "qid 0 docid grade"
//   run line:   "qid Q0 docid rank score tag"   (rank is 1-based)
// Lines starting with '#' are comments and are skipped on input.

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "car/domain.hpp"

namespace car {

class QrelsTable {
 public:
  void set(const std::string& query_id, const std::string& doc_id, int grade);
  // Absent pairs have grade 0.
  int grade(const std::string& query_id, const std::string& doc_id) const;
  // All judged grades for a query (empty when the query is unjudged).
  std::vector<int> judged_grades(const std::string& query_id) const;
  bool has_relevant(const std::string& query_id) const;
  std::size_t query_count() const noexcept { return table_.size(); }

 private:
  std::map<std::string, std::map<std::string, int>> table_;
};

// Ranked lists per query in file order. Entry scores carry the run scores.
struct RunFile {
  std::string tag = "run";
  std::vector<RankedCandidateList> queries;

  const RankedCandidateList* find(std::string_view query_id) const;
  std::vector<std::string> query_ids() const;
};

QrelsTable parse_qrels(std::istream& in);
RunFile parse_run(std::istream& in);

// Deterministic output: queries in stored order, scores with six decimals.
// Entries without a score are written with the synthetic score n - rank0.
// Each header line is emitted as "# <line>" before the data.
void write_run(const RunFile& run, std::ostream& out,
               const std::vector<std::string>& header_lines = {});

QrelsTable read_qrels_file(const std::string& path);
RunFile read_run_file(const std::string& path);

}  // namespace car
