#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <utility>
#include <vector>

#include "car/generator.hpp"

namespace car {

struct PromptTemplates {
  std::string query_only;
  std::string query_document;
  std::string entailment;

  static PromptTemplates defaults();
};

// Replaces {name} placeholders; unknown placeholders are left as written.
std::string render_template(std::string_view pattern,
                            const std::map<std::string, std::string>& values);

// Cuts to at most `max_bytes` without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string_view text, std::size_t max_bytes);

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

// POSTs JSON to `path` relative to the endpoint. Transport failures throw
// Error(kTimeout) or Error(kBackendUnavailable).
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body,
                            const HttpHeaders& headers) = 0;
};

// cpp-httplib transport. `endpoint` is scheme://host[:port][/prefix].
class HttplibTransport final : public HttpTransport {
 public:
  HttplibTransport(std::string endpoint, std::chrono::milliseconds timeout);

  HttpResponse post(const std::string& path, const std::string& body,
                    const HttpHeaders& headers) override;

 private:
  std::string origin_;
  std::string prefix_;
  std::chrono::milliseconds timeout_;
};

struct HttpGeneratorOptions {
  std::string model;
  std::string judge_model;  // empty: use `model`
  std::string api_key;      // sent as a bearer token when non-empty
  std::size_t max_concurrency = 4;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::size_t document_char_budget = 4000;
  double judge_temperature = 0.0;
  int judge_max_tokens = 8;
  PromptTemplates prompts = PromptTemplates::defaults();
};

// Lenient yes/no reading of an entailment reply. Throws UnparseableJudgment.
EntailmentVerdict parse_judgment(std::string_view reply);

// OpenAI-compatible chat-completions generator: one request per sample
// (n = 1), never more than max_concurrency requests in flight.
class HttpGenerator final : public Generator {
 public:
  HttpGenerator(HttpGeneratorOptions options, std::unique_ptr<HttpTransport> transport);

  std::string model_name() const override { return options_.model; }
  std::string sample(const GeneratorInput& input, std::size_t sample_index,
                     const DecodingParams& decoding) override;
  EntailmentVerdict judge(std::string_view premise, std::string_view hypothesis) override;
  std::string sample_fingerprint(const GeneratorInput& input,
                                 const DecodingParams& decoding) const override;
  std::string judge_fingerprint(std::string_view premise,
                                std::string_view hypothesis) const override;

  std::string render_prompt(const GeneratorInput& input) const;
  std::string render_judge_prompt(std::string_view premise, std::string_view hypothesis) const;

 private:
  std::string complete(const std::string& model, const std::string& prompt, double temperature,
                       int max_tokens);

  HttpGeneratorOptions options_;
  std::unique_ptr<HttpTransport> transport_;
  std::counting_semaphore<> slots_;
};

}  // namespace car
