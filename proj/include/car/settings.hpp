#pragma once

// Flat key=value configuration. Blank lines and lines starting with '#' are
// ignored. Every key has a default; see describe() for the full list.

#include <chrono>
#include <filesystem>
#include <istream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "car/domain.hpp"
#include "car/engine.hpp"
#include "car/generator.hpp"

namespace car {

enum class BackendKind { kScripted, kHttp };

struct BackendDescriptor {
  BackendKind kind = BackendKind::kScripted;
  std::string model_name = "scripted";
  std::string judge_model;  // empty: same as model_name
  std::string endpoint;     // HTTP only, e.g. http://localhost:8000/v1
  std::chrono::milliseconds request_timeout{60000};
  std::size_t max_concurrency = 4;
  std::size_t document_char_budget = 4000;
  std::filesystem::path script;  // scripted backend answers
  std::filesystem::path prompt_query_only;
  std::filesystem::path prompt_query_document;
  std::filesystem::path prompt_entailment;
};

struct Settings {
  CarConfig car;
  BackendDescriptor backend;
  std::size_t eval_k = 5;
};

// Relative paths are resolved against `base_dir`. Throws Error(kConfig).
void apply_setting(Settings& settings, std::string_view key, std::string_view value,
                   const std::filesystem::path& base_dir = {});

Settings parse_settings(std::istream& in, const std::filesystem::path& base_dir = {});
Settings load_settings(const std::filesystem::path& path);

// Resolved configuration as sorted "key=value" lines (for output headers).
std::vector<std::string> describe(const Settings& settings);

// Checks the CarConfig invariants and the backend descriptor.
void validate(const Settings& settings);

// Builds the configured backend. The HTTP backend reads its bearer token
// from the CAR_API_KEY environment variable.
std::unique_ptr<Generator> make_generator(const Settings& settings);

std::string format_real(double value);

}  // namespace car
