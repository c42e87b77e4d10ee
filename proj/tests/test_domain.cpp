#include "doctest.h"

#include <random>

#include "car/domain.hpp"
#include "car/errors.hpp"

using namespace car;

namespace {

RankedCandidateList make_list(int n) {
  RankedCandidateList list{"q1", {}};
  for (int i = 0; i < n; ++i) list.entries.push_back({"d" + std::to_string(i), std::nullopt});
  return list;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected car::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("validate_ranked_list") {
  CHECK_NOTHROW(validate_ranked_list(make_list(2)));
  CHECK_NOTHROW(validate_ranked_list(make_list(0)));

  RankedCandidateList dup{"q1", {{"d1", 1.0}, {"d1", 0.5}}};
  CHECK(code_of([&] { validate_ranked_list(dup); }) == ErrorCode::kDuplicateDocId);

  RankedCandidateList anonymous{"", {{"d1", std::nullopt}}};
  CHECK(code_of([&] { validate_ranked_list(anonymous); }) == ErrorCode::kEmptyQueryId);
}

TEST_CASE("truncate_scope splits head and tail in order") {
  SUBCASE("12 docs, top 10") {
    auto split = truncate_scope(make_list(12), 10);
    CHECK(split.head.size() == 10);
    REQUIRE(split.tail.size() == 2);
    CHECK(split.tail.entries[0].doc_id == "d10");
    CHECK(split.tail.entries[1].doc_id == "d11");
  }
  SUBCASE("short list") {
    auto split = truncate_scope(make_list(3), 10);
    CHECK(split.head.size() == 3);
    CHECK(split.tail.size() == 0);
  }
  SUBCASE("exact") {
    auto split = truncate_scope(make_list(10), 10);
    CHECK(split.head.size() == 10);
    CHECK(split.tail.size() == 0);
  }
  CHECK_THROWS_AS(truncate_scope(make_list(3), 0), Error);
}

TEST_CASE("truncate_scope concatenation reproduces the input") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng() % 25);
    const std::size_t top_n = 1 + rng() % 30;
    const auto list = make_list(n);
    auto [head, tail] = truncate_scope(list, top_n);
    head.entries.insert(head.entries.end(), tail.entries.begin(), tail.entries.end());
    CHECK(head == list);
  }
}

TEST_CASE("confidence values sit on the 1/k grid") {
  for (std::size_t k = 1; k <= 12; ++k) {
    for (std::size_t n = 1; n <= k; ++n) {
      ConfidenceValue c(n, k);
      CHECK(c.value() == static_cast<double>(n) / static_cast<double>(k));
      CHECK(c.value() > 0.0);
      CHECK(c.value() <= 1.0);
    }
  }
  CHECK_THROWS_AS(ConfidenceValue(0, 10), Error);
  CHECK_THROWS_AS(ConfidenceValue(11, 10), Error);
}

TEST_CASE("cluster assignment validity") {
  CHECK(is_valid({{0, 1, 0}, {2, 1}}));
  CHECK_FALSE(is_valid({{0, 2, 0}, {2, 0, 1}}));  // empty cluster
  CHECK_FALSE(is_valid({{0, 1, 0}, {1, 2}}));     // sizes disagree with labels
  CHECK_FALSE(is_valid({{}, {}}));
}

TEST_CASE("config validation") {
  CarConfig ok;
  CHECK_NOTHROW(validate(ok));
  auto bad = ok;
  bad.k = 1;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = ok;
  bad.query_threshold = 1.5;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = ok;
  bad.confidence_margin = -0.1;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = ok;
  bad.top_n = 0;
  CHECK_THROWS_AS(validate(bad), Error);
  CHECK(ok.effective_margin() == 0.2);
  ok.disable_cm = true;
  CHECK(ok.effective_margin() == 0.0);
}

TEST_CASE("query records need an id and text") {
  CHECK_NOTHROW(validate(QueryRecord{"q", "what"}));
  CHECK_THROWS_AS(validate(QueryRecord{"", "what"}), Error);
  CHECK_THROWS_AS(validate(QueryRecord{"q", "  \t"}), Error);
}

TEST_CASE("answer normalization") {
  CHECK(normalize_answer("  Paris \n", AnswerNormalization::kTrimLower) == "paris");
  CHECK(normalize_answer("  Paris ", AnswerNormalization::kNone) == "  Paris ");
}
