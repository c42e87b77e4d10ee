#include "car/http_generator.hpp"

#include <cctype>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "car/errors.hpp"

namespace car {

PromptTemplates PromptTemplates::defaults() {
  return PromptTemplates{
      "Answer the following question with a short answer of a few words.\n"
      "Question: {query}\n"
      "Answer:",
      "Use the document to answer the question with a short answer of a few words.\n"
      "Document: {document}\n"
      "Question: {query}\n"
      "Answer:",
      "Does the first statement entail the second statement? Reply with yes or no only.\n"
      "First statement: {premise}\n"
      "Second statement: {hypothesis}\n"
      "Reply:",
  };
}

std::string render_template(std::string_view pattern,
                            const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(pattern.size());
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const auto open = pattern.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = pattern.find('}', open + 1);
    if (close == std::string_view::npos) break;
    out.append(pattern.substr(pos, open - pos));
    const std::string name(pattern.substr(open + 1, close - open - 1));
    if (const auto it = values.find(name); it != values.end()) {
      out += it->second;
    } else {
      out.append(pattern.substr(open, close - open + 1));
    }
    pos = close + 1;
  }
  out.append(pattern.substr(pos));
  return out;
}

std::string truncate_utf8(std::string_view text, std::size_t max_bytes) {
  if (text.size() <= max_bytes) return std::string(text);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
  return std::string(text.substr(0, cut));
}

HttplibTransport::HttplibTransport(std::string endpoint, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::kConfig, "endpoint needs a scheme: " + endpoint);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  origin_ = endpoint.substr(0, path_start);
  if (path_start != std::string::npos) prefix_ = endpoint.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

HttpResponse HttplibTransport::post(const std::string& path, const std::string& body,
                                    const HttpHeaders& headers) {
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers request_headers;
  // The content type is passed to Post() separately.
  for (const auto& [name, value] : headers)
    if (name != "Content-Type") request_headers.emplace(name, value);

  auto result = client.Post(prefix_ + path, request_headers, body, "application/json");
  if (!result) {
    const auto err = result.error();
    const auto what = httplib::to_string(err);
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      throw Error(ErrorCode::kTimeout, origin_ + prefix_ + path + ": " + what);
    }
    throw Error(ErrorCode::kBackendUnavailable, origin_ + prefix_ + path + ": " + what);
  }
  return HttpResponse{result->status, result->body};
}

EntailmentVerdict parse_judgment(std::string_view reply) {
  std::vector<std::string> words;
  std::string word;
  for (char raw : reply) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalpha(c)) {
      word += static_cast<char>(std::tolower(c));
    } else if (!word.empty()) {
      words.push_back(std::move(word));
      word.clear();
    }
  }
  if (!word.empty()) words.push_back(std::move(word));

  auto is_yes = [](const std::string& w) {
    return w == "yes" || w == "true" || w == "entails" || w == "entailment";
  };
  auto is_no = [](const std::string& w) {
    return w == "no" || w == "not" || w == "false" || w == "contradiction" || w == "neutral";
  };
  if (!words.empty()) {
    if (is_yes(words.front())) return EntailmentVerdict::kEntails;
    if (is_no(words.front())) return EntailmentVerdict::kNotEntails;
  }
  bool any_yes = false;
  bool any_no = false;
  for (const auto& w : words) {
    any_yes = any_yes || is_yes(w);
    any_no = any_no || is_no(w);
  }
  if (any_yes != any_no) return any_yes ? EntailmentVerdict::kEntails : EntailmentVerdict::kNotEntails;
  throw Error(ErrorCode::kUnparseableJudgment, std::string(reply));
}

HttpGenerator::HttpGenerator(HttpGeneratorOptions options, std::unique_ptr<HttpTransport> transport)
    : options_(std::move(options)),
      transport_(std::move(transport)),
      slots_(static_cast<std::ptrdiff_t>(options_.max_concurrency)) {
  if (options_.max_concurrency < 1)
    throw Error(ErrorCode::kConfig, "max_concurrency must be positive");
  if (options_.attempts < 1) throw Error(ErrorCode::kConfig, "attempts must be positive");
  if (options_.model.empty()) throw Error(ErrorCode::kConfig, "model name is required");
  if (!transport_) throw Error(ErrorCode::kConfig, "no transport");
}

std::string HttpGenerator::render_prompt(const GeneratorInput& input) const {
  if (input.kind == InputKind::kQueryOnly)
    return render_template(options_.prompts.query_only, {{"query", input.query.text}});
  return render_template(
      options_.prompts.query_document,
      {{"query", input.query.text},
       {"document", truncate_utf8(input.document->text, options_.document_char_budget)}});
}

std::string HttpGenerator::render_judge_prompt(std::string_view premise,
                                               std::string_view hypothesis) const {
  return render_template(options_.prompts.entailment,
                         {{"premise", std::string(premise)}, {"hypothesis", std::string(hypothesis)}});
}

std::string HttpGenerator::sample(const GeneratorInput& input, std::size_t,
                                  const DecodingParams& decoding) {
  return complete(options_.model, render_prompt(input), decoding.temperature, decoding.max_tokens);
}

EntailmentVerdict HttpGenerator::judge(std::string_view premise, std::string_view hypothesis) {
  const auto& model = options_.judge_model.empty() ? options_.model : options_.judge_model;
  return parse_judgment(complete(model, render_judge_prompt(premise, hypothesis),
                                 options_.judge_temperature, options_.judge_max_tokens));
}

std::string HttpGenerator::sample_fingerprint(const GeneratorInput& input,
                                              const DecodingParams& decoding) const {
  std::ostringstream out;
  out << options_.model << '\n'
      << decoding.temperature << '\n'
      << decoding.max_tokens << '\n'
      << render_prompt(input);
  return out.str();
}

std::string HttpGenerator::judge_fingerprint(std::string_view premise,
                                             std::string_view hypothesis) const {
  std::ostringstream out;
  out << (options_.judge_model.empty() ? options_.model : options_.judge_model) << '\n'
      << options_.judge_temperature << '\n'
      << options_.judge_max_tokens << '\n'
      << render_judge_prompt(premise, hypothesis);
  return out.str();
}

std::string HttpGenerator::complete(const std::string& model, const std::string& prompt,
                                    double temperature, int max_tokens) {
  const nlohmann::json request = {
      {"model", model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", temperature},
      {"max_tokens", max_tokens},
      {"n", 1},
  };
  const auto body = request.dump();
  HttpHeaders headers{{"Content-Type", "application/json"}};
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);

  std::string last_failure;
  ErrorCode last_code = ErrorCode::kBackendUnavailable;
  auto backoff = options_.initial_backoff;
  for (int attempt = 0; attempt < options_.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    HttpResponse response;
    try {
      slots_.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{slots_};
      response = transport_->post("/chat/completions", body, headers);
    } catch (const Error& e) {
      last_code = e.code();
      last_failure = e.what();
      continue;
    }

    if (response.status == 429 || response.status >= 500) {
      last_code = ErrorCode::kBackendUnavailable;
      last_failure = "HTTP " + std::to_string(response.status);
      continue;
    }
    if (response.status != 200) {
      throw Error(ErrorCode::kBackendUnavailable,
                  "HTTP " + std::to_string(response.status) + ": " + response.body);
    }
    try {
      const auto reply = nlohmann::json::parse(response.body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kBackendUnavailable, std::string("malformed completion: ") + e.what());
    }
  }
  throw Error(last_code, "after " + std::to_string(options_.attempts) + " attempts: " + last_failure);
}

}  // namespace car
