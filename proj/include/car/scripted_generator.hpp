#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "car/generator.hpp"

namespace car {

// Answer lists keyed by GeneratorInput::script_key().
using SampleScript = std::map<std::string, std::vector<std::string>>;

struct EntailmentScript {
  // When set, ENTAILS iff the trimmed, lowercased strings are equal, and
  // `pairs` is ignored.
  bool equality_rule = false;
  std::map<std::pair<std::string, std::string>, EntailmentVerdict> pairs;

  static EntailmentScript equality() { return EntailmentScript{true, {}}; }
};

// Deterministic replay backend. A pure function of (input, scripts);
// anything not scripted raises ScriptMiss.
class ScriptedGenerator final : public Generator {
 public:
  ScriptedGenerator(SampleScript samples, EntailmentScript entailment,
                    std::string model_name = "scripted");

  std::string model_name() const override { return model_name_; }
  std::string sample(const GeneratorInput& input, std::size_t sample_index,
                     const DecodingParams& decoding) override;
  EntailmentVerdict judge(std::string_view premise, std::string_view hypothesis) override;
  std::string sample_fingerprint(const GeneratorInput& input,
                                 const DecodingParams& decoding) const override;
  std::string judge_fingerprint(std::string_view premise,
                                std::string_view hypothesis) const override;

  const SampleScript& samples() const noexcept { return samples_; }

 private:
  SampleScript samples_;
  EntailmentScript entailment_;
  std::string model_name_;
};

// JSON script file:
//   {"model": "...",
//    "samples": [{"query_id": "q1", "doc_id": "d1", "answers": ["..."]}, ...],
//    "entailment": "equality" | [{"premise": "a", "hypothesis": "b", "verdict": "entails"}]}
// `doc_id` is omitted for query-only inputs.
ScriptedGenerator load_scripted_generator(const std::filesystem::path& path);

}  // namespace car
