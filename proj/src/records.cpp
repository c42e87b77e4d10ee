#include "car/records.hpp"

#include <fstream>
#include <string>
#include <unordered_set>

#include "car/errors.hpp"

namespace car {

namespace {

template <typename OnRecord>
void for_each_record(std::istream& in, OnRecord&& on_record) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw Error(ErrorCode::kMalformedLine,
                  "line " + std::to_string(line_no) + ": expected id<TAB>text");
    }
    on_record(line.substr(0, tab), line.substr(tab + 1), line_no);
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<QueryRecord> parse_queries(std::istream& in) {
  std::vector<QueryRecord> queries;
  std::unordered_set<std::string> seen;
  for_each_record(in, [&](std::string id, std::string text, std::size_t line_no) {
    if (!seen.insert(id).second)
      throw Error(ErrorCode::kMalformedLine,
                  "line " + std::to_string(line_no) + ": duplicate query id " + id);
    QueryRecord query{std::move(id), std::move(text)};
    validate(query);
    queries.push_back(std::move(query));
  });
  return queries;
}

DocumentStore parse_corpus(std::istream& in) {
  DocumentStore documents;
  for_each_record(in, [&](std::string id, std::string text, std::size_t line_no) {
    auto [it, inserted] = documents.try_emplace(id, DocumentRecord{id, std::move(text)});
    if (!inserted)
      throw Error(ErrorCode::kMalformedLine,
                  "line " + std::to_string(line_no) + ": duplicate doc id " + id);
  });
  return documents;
}

std::vector<QueryRecord> read_queries(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_queries(in);
}

DocumentStore read_corpus(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_corpus(in);
}

}  // namespace car
