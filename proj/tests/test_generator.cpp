#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "car/errors.hpp"
#include "car/generator.hpp"
#include "car/http_generator.hpp"
#include "car/scripted_generator.hpp"

using namespace car;

namespace {

const QueryRecord kQuery{"x", "capital of france?"};

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

TEST_CASE("scripted sampling replays in order") {
  ScriptedGenerator gen({{"x", {"Paris", "Paris", "Lyon"}}}, EntailmentScript::equality());
  const auto input = GeneratorInput::query_only(kQuery);

  auto samples = sample_answers(gen, input, 3, {}, AnswerNormalization::kNone);
  REQUIRE(samples.size() == 3);
  CHECK(samples[0].text == "Paris");
  CHECK(samples[1].text == "Paris");
  CHECK(samples[2].text == "Lyon");
  for (std::size_t i = 0; i < 3; ++i) CHECK(samples[i].sample_index == i);

  auto single = sample_answers(gen, input, 1, {}, AnswerNormalization::kTrimLower);
  REQUIRE(single.size() == 1);
  CHECK(single[0].sample_index == 0);
  CHECK(single[0].text == "paris");

  // Pure function of the script.
  auto again = sample_answers(gen, input, 3, {}, AnswerNormalization::kNone);
  for (std::size_t i = 0; i < 3; ++i) CHECK(again[i].text == samples[i].text);
}

TEST_CASE("scripted sampling misses") {
  ScriptedGenerator gen({{"x", {"Paris", "Paris"}}}, EntailmentScript::equality());
  const auto input = GeneratorInput::query_only(kQuery);
  CHECK(code_of([&] { sample_answers(gen, input, 3, {}, AnswerNormalization::kNone); }) ==
        ErrorCode::kScriptMiss);
  const auto other = GeneratorInput::with_document(kQuery, {"d1", "text"});
  CHECK(code_of([&] { sample_answers(gen, other, 1, {}, AnswerNormalization::kNone); }) ==
        ErrorCode::kScriptMiss);
  CHECK(is_backend_failure(ErrorCode::kScriptMiss));
}

TEST_CASE("query-document inputs key on both ids") {
  ScriptedGenerator gen({{"x\td1", {"a"}}, {"x", {"b"}}}, EntailmentScript::equality());
  CHECK(gen.sample(GeneratorInput::with_document(kQuery, {"d1", ""}), 0, {}) == "a");
  CHECK(gen.sample(GeneratorInput::query_only(kQuery), 0, {}) == "b");
}

TEST_CASE("equality judge") {
  ScriptedGenerator gen({}, EntailmentScript::equality());
  CHECK(judge_entailment(gen, "Paris", "Paris") == EntailmentVerdict::kEntails);
  CHECK(judge_entailment(gen, "Paris", "Lyon") == EntailmentVerdict::kNotEntails);
  CHECK(judge_entailment(gen, " paris", "PARIS ") == EntailmentVerdict::kEntails);
}

TEST_CASE("explicit entailment script is asymmetric and strict") {
  EntailmentScript script;
  script.pairs[{"a", "b"}] = EntailmentVerdict::kEntails;
  script.pairs[{"b", "a"}] = EntailmentVerdict::kNotEntails;
  ScriptedGenerator gen({}, script);
  CHECK(gen.judge("a", "b") == EntailmentVerdict::kEntails);
  CHECK(gen.judge("b", "a") == EntailmentVerdict::kNotEntails);
  CHECK(code_of([&] { gen.judge("a", "c"); }) == ErrorCode::kScriptMiss);
}

TEST_CASE("empty scripts fail every call") {
  ScriptedGenerator gen({}, EntailmentScript{});
  CHECK(code_of([&] { gen.sample(GeneratorInput::query_only(kQuery), 0, {}); }) ==
        ErrorCode::kScriptMiss);
  CHECK(code_of([&] { gen.judge("a", "b"); }) == ErrorCode::kScriptMiss);
}

TEST_CASE("empty-answer rule never reaches the backend") {
  ScriptedGenerator inner({}, EntailmentScript{});
  CountingGenerator gen(inner);
  CHECK(judge_entailment(gen, "", "") == EntailmentVerdict::kEntails);
  CHECK(judge_entailment(gen, "  ", "") == EntailmentVerdict::kEntails);
  CHECK(judge_entailment(gen, "", "Paris") == EntailmentVerdict::kNotEntails);
  CHECK(judge_entailment(gen, "Paris", " ") == EntailmentVerdict::kNotEntails);
  CHECK(gen.judge_calls() == 0);
}

TEST_CASE("counting decorator counts one per sample and per judgment") {
  ScriptedGenerator inner({{"x", {"a", "b", "c", "d"}}}, EntailmentScript::equality());
  CountingGenerator gen(inner);
  sample_answers(gen, GeneratorInput::query_only(kQuery), 4, {}, AnswerNormalization::kNone);
  CHECK(gen.sample_calls() == 4);
  judge_entailment(gen, "a", "b");
  CHECK(gen.judge_calls() == 1);
}

TEST_CASE("sampling validates the input shape") {
  ScriptedGenerator gen({{"x", {"a"}}}, EntailmentScript::equality());
  GeneratorInput broken{InputKind::kQueryDoc, kQuery, std::nullopt};
  CHECK_THROWS_AS(sample_answers(gen, broken, 1, {}, AnswerNormalization::kNone), Error);
  CHECK_THROWS_AS(
      sample_answers(gen, GeneratorInput::query_only(kQuery), 0, {}, AnswerNormalization::kNone),
      Error);
}

TEST_CASE("script file loading") {
  const auto path = std::filesystem::temp_directory_path() / "car_script_test.json";
  {
    std::ofstream out(path);
    out << R"({"model": "m1",
      "samples": [{"query_id": "x", "answers": ["A", "B"]},
                  {"query_id": "x", "doc_id": "d1", "answers": ["C"]}],
      "entailment": [{"premise": "a", "hypothesis": "b", "verdict": "entails"}]})";
  }
  auto gen = load_scripted_generator(path);
  CHECK(gen.model_name() == "m1");
  CHECK(gen.sample(GeneratorInput::query_only(kQuery), 1, {}) == "B");
  CHECK(gen.sample(GeneratorInput::with_document(kQuery, {"d1", ""}), 0, {}) == "C");
  CHECK(gen.judge("a", "b") == EntailmentVerdict::kEntails);
  CHECK_THROWS_AS(gen.judge("b", "a"), Error);

  {
    std::ofstream out(path);
    out << R"({"samples": [{"query_id": "x"}]})";
  }
  CHECK(code_of([&] { load_scripted_generator(path); }) == ErrorCode::kConfig);
  std::filesystem::remove(path);
}

TEST_CASE("prompt rendering") {
  CHECK(render_template("Q: {query} D: {document}", {{"query", "why"}, {"document", "because"}}) ==
        "Q: why D: because");
  CHECK(render_template("{unknown} {query}", {{"query", "x"}}) == "{unknown} x");
  CHECK(render_template("no placeholders", {}) == "no placeholders");
  CHECK(render_template("dangling {query", {{"query", "x"}}) == "dangling {query");
}

TEST_CASE("UTF-8 aware truncation") {
  CHECK(truncate_utf8("abcdef", 3) == "abc");
  CHECK(truncate_utf8("abc", 10) == "abc");
  // "é" is two bytes; a cut through it backs off to the boundary.
  CHECK(truncate_utf8("a\xC3\xA9z", 2) == "a");
  CHECK(truncate_utf8("a\xC3\xA9z", 3) == "a\xC3\xA9");
}

TEST_CASE("judgment parsing is lenient but not guessy") {
  CHECK(parse_judgment("Yes") == EntailmentVerdict::kEntails);
  CHECK(parse_judgment("  yes, it does.") == EntailmentVerdict::kEntails);
  CHECK(parse_judgment("No.") == EntailmentVerdict::kNotEntails);
  CHECK(parse_judgment("Answer: no") == EntailmentVerdict::kNotEntails);
  CHECK(parse_judgment("**YES**") == EntailmentVerdict::kEntails);
  CHECK(code_of([] { parse_judgment("maybe"); }) == ErrorCode::kUnparseableJudgment);
  CHECK(code_of([] { parse_judgment(""); }) == ErrorCode::kUnparseableJudgment);
  CHECK(code_of([] { parse_judgment("I'd say yes and no"); }) == ErrorCode::kUnparseableJudgment);
}
