#include "car/scripted_generator.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "car/errors.hpp"

namespace car {

ScriptedGenerator::ScriptedGenerator(SampleScript samples, EntailmentScript entailment,
                                     std::string model_name)
    : samples_(std::move(samples)),
      entailment_(std::move(entailment)),
      model_name_(std::move(model_name)) {}

std::string ScriptedGenerator::sample(const GeneratorInput& input, std::size_t sample_index,
                                      const DecodingParams&) {
  const auto key = input.script_key();
  const auto it = samples_.find(key);
  if (it == samples_.end()) throw Error(ErrorCode::kScriptMiss, "no answers scripted for " + key);
  if (sample_index >= it->second.size()) {
    throw Error(ErrorCode::kScriptMiss, "only " + std::to_string(it->second.size()) +
                                            " answers scripted for " + key + ", sample " +
                                            std::to_string(sample_index) + " requested");
  }
  return it->second[sample_index];
}

EntailmentVerdict ScriptedGenerator::judge(std::string_view premise, std::string_view hypothesis) {
  if (entailment_.equality_rule) {
    return normalize_answer(premise, AnswerNormalization::kTrimLower) ==
                   normalize_answer(hypothesis, AnswerNormalization::kTrimLower)
               ? EntailmentVerdict::kEntails
               : EntailmentVerdict::kNotEntails;
  }
  const auto it = entailment_.pairs.find({std::string(premise), std::string(hypothesis)});
  if (it == entailment_.pairs.end()) {
    throw Error(ErrorCode::kScriptMiss, "no verdict scripted for (" + std::string(premise) +
                                            " -> " + std::string(hypothesis) + ")");
  }
  return it->second;
}

std::string ScriptedGenerator::sample_fingerprint(const GeneratorInput& input,
                                                  const DecodingParams& decoding) const {
  std::ostringstream out;
  out << "scripted|" << to_string(input.kind) << '|' << input.script_key() << "|t="
      << decoding.temperature << "|max=" << decoding.max_tokens;
  return out.str();
}

std::string ScriptedGenerator::judge_fingerprint(std::string_view premise,
                                                 std::string_view hypothesis) const {
  std::string out = "scripted-judge|";
  out.append(premise).append(1, '\0').append(hypothesis);
  return out;
}

namespace {

EntailmentVerdict parse_verdict(const std::string& text) {
  if (text == "entails") return EntailmentVerdict::kEntails;
  if (text == "not_entails") return EntailmentVerdict::kNotEntails;
  throw Error(ErrorCode::kConfig, "verdict must be entails or not_entails, got " + text);
}

}  // namespace

ScriptedGenerator load_scripted_generator(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open script " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "script " + path.string() + ": " + e.what());
  }

  try {
    SampleScript samples;
    for (const auto& item : doc.value("samples", nlohmann::json::array())) {
      QueryRecord query{item.at("query_id").get<std::string>(), {}};
      auto input = item.contains("doc_id")
                       ? GeneratorInput::with_document(
                             query, DocumentRecord{item.at("doc_id").get<std::string>(), {}})
                       : GeneratorInput::query_only(query);
      samples[input.script_key()] = item.at("answers").get<std::vector<std::string>>();
    }

    EntailmentScript entailment;
    const auto& rule = doc.value("entailment", nlohmann::json("equality"));
    if (rule.is_string()) {
      if (rule.get<std::string>() != "equality")
        throw Error(ErrorCode::kConfig, "unknown entailment rule " + rule.get<std::string>());
      entailment.equality_rule = true;
    } else {
      for (const auto& pair : rule) {
        entailment.pairs[{pair.at("premise").get<std::string>(),
                          pair.at("hypothesis").get<std::string>()}] =
            parse_verdict(pair.at("verdict").get<std::string>());
      }
    }
    return ScriptedGenerator(std::move(samples), std::move(entailment),
                             doc.value("model", std::string("scripted")));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "script " + path.string() + ": " + e.what());
  }
}

}  // namespace car
