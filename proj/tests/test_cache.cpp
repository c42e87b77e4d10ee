#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "car/cache.hpp"
#include "car/scripted_generator.hpp"

using namespace car;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("car-cache-test-" + std::to_string(rd()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

CacheKey key_for(const std::string& slot) {
  return {"model", "QUERY_ONLY", "q1", "QUERY_ONLY", sha256_hex("prompt"), slot};
}

std::size_t segment_count(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ".jsonl";
  return n;
}

}  // namespace

TEST_CASE("sha256_hex") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("").size() == 64);
}

TEST_CASE("put and get, across reopen") {
  TempDir dir;
  {
    ResponseCache cache(dir.path);
    CHECK_FALSE(cache.get(key_for("sample:0")));
    cache.put(key_for("sample:0"), "Paris");
    CHECK(cache.get(key_for("sample:0")) == std::optional<std::string>("Paris"));
    // First write wins.
    cache.put(key_for("sample:0"), "London");
    CHECK(*cache.get(key_for("sample:0")) == "Paris");
  }
  ResponseCache reopened(dir.path);
  CHECK(reopened.size() == 1);
  CHECK(*reopened.get(key_for("sample:0")) == "Paris");
  CHECK_FALSE(reopened.get(key_for("sample:1")));
}

TEST_CASE("payloads with newlines and quotes survive") {
  TempDir dir;
  const std::string payload = "line one\n\"quoted\"\ttab \xc3\xa9";
  { ResponseCache(dir.path).put(key_for("x"), payload); }
  CHECK(*ResponseCache(dir.path).get(key_for("x")) == payload);
}

TEST_CASE("concurrent writer processes keep separate segments") {
  TempDir dir;
  { ResponseCache warm(dir.path); }
  std::vector<pid_t> children;
  for (int p = 0; p < 2; ++p) {
    const pid_t pid = fork();
    REQUIRE(pid >= 0);
    if (pid == 0) {
      ResponseCache cache(dir.path);
      for (int i = 0; i < 200; ++i)
        cache.put(key_for("p" + std::to_string(p) + ":" + std::to_string(i)), "v" + std::to_string(i));
      _exit(0);
    }
    children.push_back(pid);
  }
  for (pid_t pid : children) {
    int status = 0;
    waitpid(pid, &status, 0);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
  }
  CHECK(segment_count(dir.path) == 2);
  ResponseCache merged(dir.path);
  CHECK(merged.size() == 400);
  CHECK(merged.corrupt_records() == 0);
  CHECK(*merged.get(key_for("p1:199")) == "v199");
}

TEST_CASE("corrupt records are skipped as misses") {
  TempDir dir;
  {
    ResponseCache cache(dir.path);
    cache.put(key_for("good"), "kept");
    cache.put(key_for("bad"), "tampered");
  }
  fs::path segment;
  for (const auto& e : fs::directory_iterator(dir.path)) segment = e.path();
  std::ifstream in(segment);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  in.close();
  const auto pos = second.find("tampered");
  REQUIRE(pos != std::string::npos);
  second.replace(pos, 8, "TAMPERED");
  std::ofstream out(segment, std::ios::trunc);
  out << first << '\n' << second << '\n' << "{not json\n";
  out.close();

  ResponseCache cache(dir.path);
  CHECK(cache.corrupt_records() == 2);
  CHECK(*cache.get(key_for("good")) == "kept");
  CHECK_FALSE(cache.get(key_for("bad")));
}

TEST_CASE("CachingGenerator serves warm requests without the backend") {
  TempDir dir;
  ScriptedGenerator scripted({{"q", {"A", "B", "A"}}}, EntailmentScript::equality());
  const auto input = GeneratorInput::query_only({"q", "question"});
  const DecodingParams decoding;
  {
    CountingGenerator counted(scripted);
    ResponseCache cache(dir.path);
    CachingGenerator caching(counted, cache);
    for (std::size_t i = 0; i < 3; ++i) caching.sample(input, i, decoding);
    CHECK(caching.judge("a", "b") == EntailmentVerdict::kNotEntails);
    CHECK(counted.sample_calls() == 3);
    CHECK(counted.judge_calls() == 1);
  }
  CountingGenerator counted(scripted);
  ResponseCache cache(dir.path);
  CachingGenerator caching(counted, cache);
  CHECK(caching.sample(input, 0, decoding) == "A");
  CHECK(caching.sample(input, 1, decoding) == "B");
  CHECK(caching.judge("a", "b") == EntailmentVerdict::kNotEntails);
  CHECK(caching.judge("a", "a") == EntailmentVerdict::kEntails);
  CHECK(counted.sample_calls() == 0);
  CHECK(counted.judge_calls() == 1);

  // A different decoding setting is a different prompt fingerprint.
  DecodingParams hotter;
  hotter.temperature = 1.5;
  caching.sample(input, 0, hotter);
  CHECK(counted.sample_calls() == 1);
}
