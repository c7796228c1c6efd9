#include <fstream>
#include <sstream>

#include "json.hpp"
#include "mao/chat.hpp"
#include "mao/text.hpp"

namespace mao {

std::string_view to_string(BackendError::Kind kind) {
  switch (kind) {
    case BackendError::Kind::Transport: return "Transport";
    case BackendError::Kind::RateLimited: return "RateLimited";
    case BackendError::Kind::Malformed: return "Malformed";
  }
  return "?";
}

ReplayBackend ReplayBackend::from_jsonl(std::string_view text) {
  std::vector<ReplayEntry> entries;
  std::size_t line_no = 0;
  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      entries.push_back({j.at("phase").get<std::string>(), j.at("content").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw ReplayError("replay line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return ReplayBackend(std::move(entries));
}

ReplayBackend ReplayBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReplayError("cannot read replay file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_jsonl(ss.str());
}

std::string ReplayBackend::complete(const ChatRequest& request) {
  if (request.messages.empty()) throw std::invalid_argument("complete: empty message list");
  if (next_ >= entries_.size()) {
    throw ReplayExhausted("replay exhausted after " + std::to_string(entries_.size()) + " replies (" +
                          request.phase + " turn)");
  }
  const ReplayEntry& e = entries_[next_];
  if (!e.phase.empty() && !request.phase.empty() && e.phase != request.phase) {
    throw ReplayError("replay entry " + std::to_string(next_ + 1) + " is tagged " + e.phase + " but the " +
                      request.phase + " phase asked for it");
  }
  ++next_;
  return e.content;
}

}  // namespace mao
