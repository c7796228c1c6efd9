#include "httplib.h"

#include <thread>

#include "json.hpp"
#include "mao/chat.hpp"

namespace mao {

HttpBackend::HttpBackend(HttpOptions options) : options_(std::move(options)) {
  if (options_.attempts < 1) throw std::invalid_argument("HttpBackend: attempts must be >= 1");
  const std::string& url = options_.base_url;
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw std::invalid_argument("HttpBackend: base URL needs a scheme: " + url);
  const auto path = url.find('/', scheme + 3);
  host_ = url.substr(0, path);
  prefix_ = path == std::string::npos ? "" : url.substr(path);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

std::string HttpBackend::complete(const ChatRequest& request) {
  if (request.messages.empty()) throw std::invalid_argument("complete: empty message list");

  nlohmann::json body;
  body["model"] = options_.model;
  body["temperature"] = request.params.temperature;
  body["messages"] = nlohmann::json::array();
  for (const WireMessage& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  std::optional<BackendError> last;
  for (int attempt = 0; attempt < options_.attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(options_.backoff * (1 << (attempt - 1)));

    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    const auto res = client.Post(prefix_ + "/chat/completions", headers, payload, "application/json");

    if (!res) {
      last.emplace(BackendError::Kind::Transport, "transport error: " + httplib::to_string(res.error()));
      continue;
    }
    if (res->status == 429) {
      last.emplace(BackendError::Kind::RateLimited, "rate limited (HTTP 429)");
      continue;
    }
    if (res->status >= 500) {
      last.emplace(BackendError::Kind::Transport, "server error HTTP " + std::to_string(res->status));
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError(BackendError::Kind::Transport,
                         "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300));
    }
    try {
      const auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(BackendError::Kind::Malformed, std::string("unexpected response body: ") + e.what());
    }
  }
  throw BackendError(last->kind(),
                     std::string(last->what()) + " after " + std::to_string(options_.attempts) + " attempts");
}

}  // namespace mao
