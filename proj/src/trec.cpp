#include "car/trec.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "car/errors.hpp"

namespace car {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
      ++pos;
    const auto start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r') ++pos;
    if (pos > start) fields.push_back(line.substr(start, pos - start));
  }
  return fields;
}

bool skippable(std::string_view line) {
  const auto body = trim(line);
  return body.empty() || body.front() == '#';
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

[[noreturn]] void malformed(std::size_t line_no, std::string_view why) {
  throw Error(ErrorCode::kMalformedLine, "line " + std::to_string(line_no) + ": " + std::string(why));
}

}  // namespace

void QrelsTable::set(const std::string& query_id, const std::string& doc_id, int grade) {
  if (grade < 0) throw Error(ErrorCode::kInvalidArgument, "negative relevance grade");
  table_[query_id][doc_id] = grade;
}

int QrelsTable::grade(const std::string& query_id, const std::string& doc_id) const {
  const auto q = table_.find(query_id);
  if (q == table_.end()) return 0;
  const auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

std::vector<int> QrelsTable::judged_grades(const std::string& query_id) const {
  std::vector<int> grades;
  if (const auto q = table_.find(query_id); q != table_.end())
    for (const auto& [doc, g] : q->second) grades.push_back(g);
  return grades;
}

bool QrelsTable::has_relevant(const std::string& query_id) const {
  for (int g : judged_grades(query_id))
    if (g > 0) return true;
  return false;
}

const RankedCandidateList* RunFile::find(std::string_view query_id) const {
  for (const auto& list : queries)
    if (list.query_id == query_id) return &list;
  return nullptr;
}

std::vector<std::string> RunFile::query_ids() const {
  std::vector<std::string> ids;
  ids.reserve(queries.size());
  for (const auto& q : queries) ids.push_back(q.query_id);
  return ids;
}

QrelsTable parse_qrels(std::istream& in) {
  QrelsTable qrels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 4) malformed(line_no, "expected 'qid 0 docid grade'");
    int grade = 0;
    if (!parse_number(fields[3], grade) || grade < 0) malformed(line_no, "bad relevance grade");
    qrels.set(std::string(fields[0]), std::string(fields[2]), grade);
  }
  return qrels;
}

RunFile parse_run(std::istream& in) {
  RunFile run;
  std::unordered_map<std::string, std::size_t> slot_of;
  std::vector<long> last_rank;
  std::vector<std::unordered_set<std::string>> seen;
  bool tag_set = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 6) malformed(line_no, "expected 'qid Q0 docid rank score tag'");
    long rank = 0;
    double score = 0.0;
    if (!parse_number(fields[3], rank) || rank < 1) malformed(line_no, "bad rank");
    if (!parse_number(fields[4], score)) malformed(line_no, "bad score");
    if (!tag_set) {
      run.tag = std::string(fields[5]);
      tag_set = true;
    }

    std::string qid(fields[0]);
    std::string docid(fields[2]);
    auto [it, inserted] = slot_of.try_emplace(qid, run.queries.size());
    if (inserted) {
      run.queries.push_back(RankedCandidateList{qid, {}});
      last_rank.push_back(0);
      seen.emplace_back();
    }
    const auto slot = it->second;
    auto& list = run.queries[slot];
    if (rank <= last_rank[slot] ||
        (!list.entries.empty() && score > *list.entries.back().baseline_score)) {
      throw Error(ErrorCode::kInconsistentRank, qid + " " + docid + " (line " +
                                                    std::to_string(line_no) + ")");
    }
    if (!seen[slot].insert(docid).second) throw Error(ErrorCode::kDuplicateDocId, qid + " " + docid);
    last_rank[slot] = rank;
    list.entries.push_back(RankedEntry{std::move(docid), score});
  }
  return run;
}

void write_run(const RunFile& run, std::ostream& out, const std::vector<std::string>& header_lines) {
  for (const auto& line : header_lines) out << "# " << line << '\n';
  char score_text[64];
  for (const auto& list : run.queries) {
    const auto n = list.entries.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& entry = list.entries[i];
      const double score = entry.baseline_score.value_or(static_cast<double>(n - i));
      std::snprintf(score_text, sizeof score_text, "%.6f", score);
      out << list.query_id << " Q0 " << entry.doc_id << ' ' << (i + 1) << ' ' << score_text << ' '
          << run.tag << '\n';
    }
  }
}

QrelsTable read_qrels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open qrels " + path);
  return parse_qrels(in);
}

RunFile read_run_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open run " + path);
  return parse_run(in);
}

}  // namespace car
