#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "skillroute/prompts.hpp"

namespace skillroute {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct CompletionRequest {
  TemplateId template_id = TemplateId::benchmark_profile;
  std::string subject;  // benchmark/task name or log scope, for error messages and fixtures
  std::vector<ChatMessage> messages;

  /// Text of the first user message: the rendered prompt.
  const std::string& prompt() const;
};

/// Anything that turns a chat request into completion text.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  /// Throws Error(endpoint) on transport failure, Error(fixture_miss) for offline misses.
  virtual std::string complete(const CompletionRequest& request) = 0;
};

struct EndpointConfig {
  std::string url;  // e.g. https://host/v1/chat/completions
  std::string model;
  std::string api_key;
  std::optional<double> temperature = 0.0;
  int timeout_seconds = 120;

  /// Reads PROFILER_ENDPOINT, PROFILER_MODEL and PROFILER_API_KEY; nullopt
  /// when no endpoint is set.
  static std::optional<EndpointConfig> from_env();
};

/// POSTs {model, messages, temperature} and reads choices[0].message.content
/// (or choices[0].text).
class HttpCompletionClient final : public CompletionClient {
 public:
  explicit HttpCompletionClient(EndpointConfig config);
  std::string complete(const CompletionRequest& request) override;

 private:
  EndpointConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

/// Offline replay. Fixtures live at <dir>/<template_id>/<key>.json where key
/// is the first 16 hex digits of SHA-256 over the rendered prompt.
class FixtureCompletionClient final : public CompletionClient {
 public:
  explicit FixtureCompletionClient(std::filesystem::path dir);
  std::string complete(const CompletionRequest& request) override;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

/// Forwards to another client and saves every completion as a replay fixture.
class RecordingCompletionClient final : public CompletionClient {
 public:
  RecordingCompletionClient(CompletionClient& inner, std::filesystem::path dir);
  std::string complete(const CompletionRequest& request) override;

 private:
  CompletionClient& inner_;
  std::filesystem::path dir_;
};

std::string fixture_key(std::string_view prompt);
std::filesystem::path fixture_path(const std::filesystem::path& dir, TemplateId id, std::string_view prompt);

/// Writes one replay fixture for `prompt`.
void write_fixture(const std::filesystem::path& dir, TemplateId id, const std::string& subject,
                   std::string_view prompt, const std::string& completion);

}  // namespace skillroute
