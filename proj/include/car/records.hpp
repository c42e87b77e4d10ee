#pragma once

// Line-oriented UTF-8 record files: "id<TAB>text" per line. Blank lines are
// skipped.

#include <filesystem>
#include <istream>
#include <vector>

#include "car/domain.hpp"
#include "car/engine.hpp"

namespace car {

std::vector<QueryRecord> parse_queries(std::istream& in);
DocumentStore parse_corpus(std::istream& in);

std::vector<QueryRecord> read_queries(const std::filesystem::path& path);
DocumentStore read_corpus(const std::filesystem::path& path);

}  // namespace car
