#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "car/domain.hpp"

namespace car {

enum class InputKind { kQueryOnly, kQueryDoc };

struct GeneratorInput {
  InputKind kind = InputKind::kQueryOnly;
  QueryRecord query;
  std::optional<DocumentRecord> document;  // present iff kind == kQueryDoc

  static GeneratorInput query_only(QueryRecord query);
  static GeneratorInput with_document(QueryRecord query, DocumentRecord document);

  const std::string& doc_id_or_empty() const;
  // "qid" for query-only inputs, "qid\tdocid" otherwise.
  std::string script_key() const;
};

std::string_view to_string(InputKind kind);

enum class EntailmentVerdict { kEntails, kNotEntails };

// The generator phi, reachable only through sampling and prompting.
// Implementations must be safe for concurrent invocation.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::string model_name() const = 0;

  // One raw sampled answer. Callers assign sample_index.
  virtual std::string sample(const GeneratorInput& input, std::size_t sample_index,
                             const DecodingParams& decoding) = 0;

  // One directed judgment: does `premise` entail `hypothesis`?
  virtual EntailmentVerdict judge(std::string_view premise, std::string_view hypothesis) = 0;

  // Stable text identifying a request (rendered prompt plus decoding
  // parameters). Feeds cache keys, so prompt edits invalidate entries.
  virtual std::string sample_fingerprint(const GeneratorInput& input,
                                         const DecodingParams& decoding) const = 0;
  virtual std::string judge_fingerprint(std::string_view premise,
                                        std::string_view hypothesis) const = 0;
};

// Draws exactly k samples (indices 0..k-1), normalized. Up to `concurrency`
// requests are in flight at once.
std::vector<AnswerSample> sample_answers(Generator& generator, const GeneratorInput& input,
                                         std::size_t k, const DecodingParams& decoding,
                                         AnswerNormalization normalization,
                                         std::size_t concurrency = 1);

// Directed judgment with the empty-answer rule applied first: two empty
// answers entail each other, an empty and a non-empty answer never do, and
// neither case reaches the generator.
EntailmentVerdict judge_entailment(Generator& generator, std::string_view premise,
                                   std::string_view hypothesis);

// Pass-through decorator that counts physical calls reaching `inner`.
class CountingGenerator final : public Generator {
 public:
  explicit CountingGenerator(Generator& inner) : inner_(inner) {}

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

  std::uint64_t sample_calls() const noexcept { return sample_calls_.load(); }
  std::uint64_t judge_calls() const noexcept { return judge_calls_.load(); }
  void reset() noexcept {
    sample_calls_ = 0;
    judge_calls_ = 0;
  }

 private:
  Generator& inner_;
  std::atomic<std::uint64_t> sample_calls_{0};
  std::atomic<std::uint64_t> judge_calls_{0};
};

}  // namespace car
