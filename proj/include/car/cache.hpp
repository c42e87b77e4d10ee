#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "car/generator.hpp"

namespace car {

// Hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

struct CacheKey {
  std::string model_name;
  std::string input_kind;  // QUERY_ONLY, QUERY_DOC or JUDGE
  std::string query_id;
  std::string doc_id;  // "QUERY_ONLY" for query-only inputs, "-" for judgments
  std::string prompt_hash;
  std::string slot;  // "sample:<index>" or "judge"

  std::string encode() const;
};

// Append-only store of generator outputs under a directory. Every writer
// appends to its own segment file, one JSON record per line with a SHA-256
// checksum; all segments are read at open. A record that fails its checksum
// is skipped with a warning on stderr and behaves as a miss. The first
// payload written for a key wins.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path directory);
  ~ResponseCache();

  ResponseCache(const ResponseCache&) = delete;
  ResponseCache& operator=(const ResponseCache&) = delete;

  std::optional<std::string> get(const CacheKey& key) const;
  void put(const CacheKey& key, const std::string& payload);

  std::size_t size() const;
  std::size_t corrupt_records() const noexcept { return corrupt_; }
  const std::filesystem::path& directory() const noexcept { return directory_; }

 private:
  void load_segment(const std::filesystem::path& path);
  void append_record(const std::string& line);

  std::filesystem::path directory_;
  std::filesystem::path segment_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
  std::size_t corrupt_ = 0;
  int fd_ = -1;
};

// Serves samples and judgments from `cache`, falling through to `inner` on
// a miss and recording the result.
class CachingGenerator final : public Generator {
 public:
  CachingGenerator(Generator& inner, ResponseCache& cache) : inner_(inner), cache_(cache) {}

  std::string model_name() const override { return inner_.model_name(); }
  std::string sample(const GeneratorInput& input, std::size_t sample_index,
                     const DecodingParams& decoding) override;
  EntailmentVerdict judge(std::string_view premise, std::string_view hypothesis) override;
  std::string sample_fingerprint(const GeneratorInput& input,
                                 const DecodingParams& decoding) const override {
    return inner_.sample_fingerprint(input, decoding);
  }
  std::string judge_fingerprint(std::string_view premise,
                                std::string_view hypothesis) const override {
    return inner_.judge_fingerprint(premise, hypothesis);
  }

 private:
  Generator& inner_;
  ResponseCache& cache_;
};

}  // namespace car
