#include "car/generator.hpp"

#include "car/errors.hpp"
#include "car/parallel.hpp"

namespace car {

GeneratorInput GeneratorInput::query_only(QueryRecord query) {
  return GeneratorInput{InputKind::kQueryOnly, std::move(query), std::nullopt};
}

GeneratorInput GeneratorInput::with_document(QueryRecord query, DocumentRecord document) {
  return GeneratorInput{InputKind::kQueryDoc, std::move(query), std::move(document)};
}

const std::string& GeneratorInput::doc_id_or_empty() const {
  static const std::string kEmpty;
  return document ? document->doc_id : kEmpty;
}

std::string GeneratorInput::script_key() const {
  if (kind == InputKind::kQueryOnly) return query.query_id;
  return query.query_id + '\t' + doc_id_or_empty();
}

std::string_view to_string(InputKind kind) {
  return kind == InputKind::kQueryOnly ? "QUERY_ONLY" : "QUERY_DOC";
}

std::vector<AnswerSample> sample_answers(Generator& generator, const GeneratorInput& input,
                                         std::size_t k, const DecodingParams& decoding,
                                         AnswerNormalization normalization,
                                         std::size_t concurrency) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if ((input.kind == InputKind::kQueryDoc) != input.document.has_value())
    throw Error(ErrorCode::kInvalidArgument, "document must be present exactly for QUERY_DOC");
  std::vector<AnswerSample> samples(k);
  parallel_for(k, concurrency, [&](std::size_t i) {
    samples[i] = AnswerSample{normalize_answer(generator.sample(input, i, decoding), normalization),
                              i};
  });
  return samples;
}

EntailmentVerdict judge_entailment(Generator& generator, std::string_view premise,
                                   std::string_view hypothesis) {
  const bool premise_empty = trim(premise).empty();
  const bool hypothesis_empty = trim(hypothesis).empty();
  if (premise_empty && hypothesis_empty) return EntailmentVerdict::kEntails;
  if (premise_empty || hypothesis_empty) return EntailmentVerdict::kNotEntails;
  return generator.judge(premise, hypothesis);
}

std::string CountingGenerator::sample(const GeneratorInput& input, std::size_t sample_index,
                                      const DecodingParams& decoding) {
  ++sample_calls_;
  return inner_.sample(input, sample_index, decoding);
}

EntailmentVerdict CountingGenerator::judge(std::string_view premise, std::string_view hypothesis) {
  ++judge_calls_;
  return inner_.judge(premise, hypothesis);
}

}  // namespace car
