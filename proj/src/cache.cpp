#include "car/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <openssl/evp.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>

#include "json.hpp"

#include "car/errors.hpp"

namespace car {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::kIo, "SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string CacheKey::encode() const {
  return nlohmann::json::array({model_name, input_kind, query_id, doc_id, prompt_hash, slot}).dump();
}

namespace {

std::string record_checksum(const std::string& key, const std::string& payload) {
  return sha256_hex(key + '\n' + payload);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ResponseCache::ResponseCache(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create cache dir " + directory_.string());
  for (const auto& item : std::filesystem::directory_iterator(directory_)) {
    if (item.is_regular_file() && item.path().extension() == ".jsonl") load_segment(item.path());
  }
  std::random_device rd;
  segment_ = directory_ / ("segment-" + std::to_string(::getpid()) + "-" +
                           std::to_string(std::uniform_int_distribution<unsigned>{}(rd)) + ".jsonl");
}

ResponseCache::~ResponseCache() {
  if (fd_ >= 0) ::close(fd_);
}

void ResponseCache::load_segment(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto record = nlohmann::json::parse(line);
      auto key = record.at("key").get<std::string>();
      auto payload = record.at("payload").get<std::string>();
      if (record.at("checksum").get<std::string>() != record_checksum(key, payload))
        throw Error(ErrorCode::kCacheCorrupt, "checksum mismatch");
      entries_.try_emplace(std::move(key), std::move(payload));
    } catch (const std::exception& e) {
      ++corrupt_;
      std::cerr << "warning: " << to_string(ErrorCode::kCacheCorrupt) << ": " << path.string()
                << ":" << line_no << " skipped (" << e.what() << ")\n";
    }
  }
}

std::optional<std::string> ResponseCache::get(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  const auto it = entries_.find(key.encode());
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void ResponseCache::put(const CacheKey& key, const std::string& payload) {
  auto encoded = key.encode();
  std::lock_guard lock(mutex_);
  if (entries_.contains(encoded)) return;
  const nlohmann::json record = {
      {"key", encoded},
      {"payload", payload},
      {"created_at", utc_timestamp()},
      {"checksum", record_checksum(encoded, payload)},
  };
  append_record(record.dump() + '\n');
  entries_.emplace(std::move(encoded), payload);
}

void ResponseCache::append_record(const std::string& line) {
  if (fd_ < 0) {
    fd_ = ::open(segment_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0)
      throw Error(ErrorCode::kIo, "cannot open " + segment_.string() + ": " + std::strerror(errno));
  }
  // One write per record; a torn record fails its checksum on the next load.
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, "cache write failed: " + std::string(std::strerror(errno)));
    }
    written += static_cast<std::size_t>(n);
  }
}

std::string CachingGenerator::sample(const GeneratorInput& input, std::size_t sample_index,
                                     const DecodingParams& decoding) {
  const CacheKey key{inner_.model_name(),
                     std::string(to_string(input.kind)),
                     input.query.query_id,
                     input.kind == InputKind::kQueryOnly ? "QUERY_ONLY" : input.doc_id_or_empty(),
                     sha256_hex(inner_.sample_fingerprint(input, decoding)),
                     "sample:" + std::to_string(sample_index)};
  if (auto hit = cache_.get(key)) return *std::move(hit);
  auto answer = inner_.sample(input, sample_index, decoding);
  cache_.put(key, answer);
  return answer;
}

EntailmentVerdict CachingGenerator::judge(std::string_view premise, std::string_view hypothesis) {
  const CacheKey key{inner_.model_name(), "JUDGE", "-", "-",
                     sha256_hex(inner_.judge_fingerprint(premise, hypothesis)), "judge"};
  if (auto hit = cache_.get(key)) {
    if (*hit == "entails") return EntailmentVerdict::kEntails;
    if (*hit == "not_entails") return EntailmentVerdict::kNotEntails;
  }
  const auto verdict = inner_.judge(premise, hypothesis);
  cache_.put(key, verdict == EntailmentVerdict::kEntails ? "entails" : "not_entails");
  return verdict;
}

}  // namespace car
