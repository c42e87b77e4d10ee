#include "car/settings.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "car/errors.hpp"
#include "car/http_generator.hpp"
#include "car/scripted_generator.hpp"

namespace car {

std::string format_real(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ec == std::errc{} ? end : buf);
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kConfig, "bad value for " + std::string(key) + ": '" +
                                      std::string(value) + "'");
}

double to_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return out;
}

std::size_t to_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

std::filesystem::path to_path(std::string_view value, const std::filesystem::path& base_dir) {
  std::filesystem::path p{std::string(value)};
  if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

void apply_setting(Settings& settings, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir) {
  auto& car = settings.car;
  auto& backend = settings.backend;
  if (key == "k") {
    car.k = to_count(key, value);
  } else if (key == "qt") {
    car.query_threshold = to_real(key, value);
  } else if (key == "cm") {
    car.confidence_margin = to_real(key, value);
  } else if (key == "top_n") {
    car.top_n = to_count(key, value);
  } else if (key == "mode") {
    const auto mode = parse_clustering_mode(value);
    if (!mode) bad_value(key, value);
    car.clustering_mode = *mode;
  } else if (key == "disable_qt") {
    car.disable_qt = to_bool(key, value);
  } else if (key == "disable_cm") {
    car.disable_cm = to_bool(key, value);
  } else if (key == "temperature") {
    car.decoding.temperature = to_real(key, value);
  } else if (key == "max_tokens") {
    car.decoding.max_tokens = static_cast<int>(to_count(key, value));
  } else if (key == "judge_temperature") {
    car.judge_temperature = to_real(key, value);
  } else if (key == "normalization") {
    const auto norm = parse_answer_normalization(value);
    if (!norm) bad_value(key, value);
    car.answer_normalization = *norm;
  } else if (key == "pairwise_short_circuit") {
    car.pairwise_short_circuit = to_bool(key, value);
  } else if (key == "concurrency") {
    car.concurrency = to_count(key, value);
  } else if (key == "run_tag") {
    car.run_tag = std::string(value);
  } else if (key == "eval_k") {
    settings.eval_k = to_count(key, value);
  } else if (key == "backend") {
    if (value == "scripted") {
      backend.kind = BackendKind::kScripted;
    } else if (value == "http") {
      backend.kind = BackendKind::kHttp;
    } else {
      bad_value(key, value);
    }
  } else if (key == "model") {
    backend.model_name = std::string(value);
  } else if (key == "judge_model") {
    backend.judge_model = std::string(value);
  } else if (key == "endpoint") {
    backend.endpoint = std::string(value);
  } else if (key == "timeout_ms") {
    backend.request_timeout = std::chrono::milliseconds(to_count(key, value));
  } else if (key == "max_concurrency") {
    backend.max_concurrency = to_count(key, value);
  } else if (key == "doc_char_budget") {
    backend.document_char_budget = to_count(key, value);
  } else if (key == "script") {
    backend.script = to_path(value, base_dir);
  } else if (key == "prompt_query_only") {
    backend.prompt_query_only = to_path(value, base_dir);
  } else if (key == "prompt_query_document") {
    backend.prompt_query_document = to_path(value, base_dir);
  } else if (key == "prompt_entailment") {
    backend.prompt_entailment = to_path(value, base_dir);
  } else {
    throw Error(ErrorCode::kConfig, "unknown key " + std::string(key));
  }
}

Settings parse_settings(std::istream& in, const std::filesystem::path& base_dir) {
  Settings settings;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": expected key=value");
    apply_setting(settings, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), base_dir);
  }
  return settings;
}

Settings load_settings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  return parse_settings(in, path.parent_path());
}

std::vector<std::string> describe(const Settings& s) {
  const auto& c = s.car;
  const auto& b = s.backend;
  const bool http = b.kind == BackendKind::kHttp;
  std::vector<std::string> lines = {
      "backend=" + std::string(http ? "http" : "scripted"),
      "cm=" + format_real(c.confidence_margin),
      "concurrency=" + std::to_string(c.concurrency),
      "disable_cm=" + std::string(c.disable_cm ? "true" : "false"),
      "disable_qt=" + std::string(c.disable_qt ? "true" : "false"),
      "eval_k=" + std::to_string(s.eval_k),
      "judge_temperature=" + format_real(c.judge_temperature),
      "k=" + std::to_string(c.k),
      "max_tokens=" + std::to_string(c.decoding.max_tokens),
      "mode=" + std::string(to_string(c.clustering_mode)),
      "model=" + b.model_name,
      "normalization=" + std::string(to_string(c.answer_normalization)),
      "pairwise_short_circuit=" + std::string(c.pairwise_short_circuit ? "true" : "false"),
      "qt=" + format_real(c.query_threshold),
      "run_tag=" + c.run_tag,
      "temperature=" + format_real(c.decoding.temperature),
      "top_n=" + std::to_string(c.top_n),
  };
  if (http) {
    lines.push_back("doc_char_budget=" + std::to_string(b.document_char_budget));
    lines.push_back("endpoint=" + b.endpoint);
    lines.push_back("judge_model=" + (b.judge_model.empty() ? b.model_name : b.judge_model));
    lines.push_back("max_concurrency=" + std::to_string(b.max_concurrency));
    lines.push_back("timeout_ms=" + std::to_string(b.request_timeout.count()));
  }
  std::sort(lines.begin(), lines.end());
  return lines;
}

void validate(const Settings& settings) {
  validate(settings.car);
  if (settings.eval_k < 1) throw Error(ErrorCode::kConfig, "eval_k must be >= 1");
  const auto& b = settings.backend;
  if (b.kind == BackendKind::kHttp && b.endpoint.empty())
    throw Error(ErrorCode::kConfig, "the http backend needs an endpoint");
  if (b.kind == BackendKind::kScripted && !b.endpoint.empty())
    throw Error(ErrorCode::kConfig, "endpoint is only valid for the http backend");
  if (b.max_concurrency < 1) throw Error(ErrorCode::kConfig, "max_concurrency must be >= 1");
}

std::unique_ptr<Generator> make_generator(const Settings& settings) {
  validate(settings);
  const auto& b = settings.backend;
  if (b.kind == BackendKind::kScripted) {
    if (b.script.empty()) throw Error(ErrorCode::kConfig, "the scripted backend needs script=");
    return std::make_unique<ScriptedGenerator>(load_scripted_generator(b.script));
  }

  HttpGeneratorOptions options;
  options.model = b.model_name;
  options.judge_model = b.judge_model;
  if (const char* key = std::getenv("CAR_API_KEY")) options.api_key = key;
  options.max_concurrency = b.max_concurrency;
  options.document_char_budget = b.document_char_budget;
  options.judge_temperature = settings.car.judge_temperature;
  if (!b.prompt_query_only.empty()) options.prompts.query_only = read_text(b.prompt_query_only);
  if (!b.prompt_query_document.empty())
    options.prompts.query_document = read_text(b.prompt_query_document);
  if (!b.prompt_entailment.empty()) options.prompts.entailment = read_text(b.prompt_entailment);
  return std::make_unique<HttpGenerator>(
      std::move(options), std::make_unique<HttplibTransport>(b.endpoint, b.request_timeout));
}

}  // namespace car
