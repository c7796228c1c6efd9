// Chat backends: the only place the pipeline talks to a language model.
#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mao {

struct WireMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct SamplingParams {
  double temperature = 0.0;
};

struct ChatRequest {
  std::vector<WireMessage> messages;
  SamplingParams params;
  /// Phase tag of the turn. Replay scripts are checked against it.
  std::string phase;
};

class BackendError : public std::runtime_error {
 public:
  enum class Kind { Transport, RateLimited, Malformed };
  BackendError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(BackendError::Kind kind);

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayExhausted : public ReplayError {
 public:
  using ReplayError::ReplayError;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// Throws std::invalid_argument on an empty message list.
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct ReplayEntry {
  std::string phase;
  std::string content;
};

/// Scripted replies consumed strictly in order. One instance per session.
class ReplayBackend : public ChatBackend {
 public:
  explicit ReplayBackend(std::vector<ReplayEntry> entries) : entries_(std::move(entries)) {}

  /// JSON Lines of {"phase","content"}; blank lines are skipped.
  static ReplayBackend from_jsonl(std::string_view text);
  static ReplayBackend from_file(const std::filesystem::path& path);

  std::string complete(const ChatRequest& request) override;

  [[nodiscard]] std::size_t consumed() const { return next_; }
  [[nodiscard]] std::size_t remaining() const { return entries_.size() - next_; }

 private:
  std::vector<ReplayEntry> entries_;
  std::size_t next_ = 0;
};

struct HttpOptions {
  /// e.g. "https://api.openai.com/v1"; "/chat/completions" is appended.
  std::string base_url;
  std::string api_key;
  std::string model;
  int attempts = 3;
  std::chrono::milliseconds backoff{500};
  std::chrono::seconds timeout{120};
};

/// Chat-completions client. Stateless per request, so one instance may serve
/// concurrent sessions.
class HttpBackend : public ChatBackend {
 public:
  explicit HttpBackend(HttpOptions options);
  std::string complete(const ChatRequest& request) override;

 private:
  HttpOptions options_;
  std::string host_;    // scheme://host[:port]
  std::string prefix_;  // path part of base_url, without trailing '/'
};

}  // namespace mao
