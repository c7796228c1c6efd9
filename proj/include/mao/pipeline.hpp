// The four-phase multi-agent pipeline: a team leader instructs a process
// design expert (generation, refinement, fixes) and a process reviewer
// (semantic review, validator tool). Every turn lands in one transcript.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mao/chat.hpp"
#include "mao/model.hpp"
#include "mao/semantic_lint.hpp"
#include "mao/validator.hpp"

namespace mao {

enum class Phase { Generation, Refinement, Reviewing, Testing };
inline constexpr Phase kAllPhases[] = {Phase::Generation, Phase::Refinement, Phase::Reviewing, Phase::Testing};

std::string_view to_string(Phase p);
/// Throws std::invalid_argument on an unknown name.
Phase parse_phase(std::string_view name);

enum class Role { TeamLeader, ProcessDesignExpert, ProcessReviewer };
enum class Stance { Instructor, Assistant };

std::string_view to_string(Role r);

struct RoleCard {
  Role role;
  Stance stance;
  std::string system_prompt;
};

const RoleCard& role_card(Role role);

struct ChatMessage {
  std::size_t index = 0;
  Phase phase = Phase::Generation;
  Role speaker = Role::TeamLeader;
  std::string content;
  /// Set on model-generated turns.
  std::optional<double> temperature;

  bool operator==(const ChatMessage&) const = default;
};

class ChatTranscript {
 public:
  const ChatMessage& append(Phase phase, Role speaker, std::string content,
                            std::optional<double> temperature = std::nullopt);

  [[nodiscard]] const std::vector<ChatMessage>& messages() const { return messages_; }
  [[nodiscard]] std::size_t count(Phase phase) const;
  [[nodiscard]] std::size_t count(Phase phase, Role speaker) const;
  [[nodiscard]] std::string to_jsonl() const;

 private:
  std::vector<ChatMessage> messages_;
};

/// Tools the reviewer may call during Testing, keyed by name.
struct ToolRegistry {
  struct Tool {
    std::string name;
    std::string description;
  };
  std::vector<Tool> tools{{"validator", "checks BPMN text against the process constraints and reports violations"}};
};

struct PipelineConfig {
  bool refinement = true;
  bool reviewing = true;
  bool testing = true;
  int max_review_rounds = 3;
  int max_test_rounds = 3;
  int max_parse_retries = 2;
  std::shared_ptr<ChatBackend> backend;
  std::vector<std::string> few_shot_examples = default_examples();
  RuleRegistry registry = RuleRegistry::defaults();
  ToolRegistry tools;
  double expert_temperature = 0.0;
  double reviewer_temperature = 0.0;
  /// Keep the input model (with a warning) when refinement cannot produce a parseable reply.
  bool refinement_fallback = false;

  [[nodiscard]] bool enabled(Phase p) const;
  /// Throws std::invalid_argument on caps < 1, negative retries or a null backend.
  void check() const;

  static std::vector<std::string> default_examples();
};

class PipelineError : public std::runtime_error {
 public:
  PipelineError(Phase phase, const std::string& what, ChatTranscript partial = {})
      : std::runtime_error(what), phase_(phase), transcript_(std::move(partial)) {}
  [[nodiscard]] Phase phase() const { return phase_; }
  [[nodiscard]] const ChatTranscript& transcript() const { return transcript_; }
  void attach(ChatTranscript t) { transcript_ = std::move(t); }

 private:
  Phase phase_;
  ChatTranscript transcript_;
};

class GenerationFailed : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

class RefinementFailed : public PipelineError {
 public:
  using PipelineError::PipelineError;
};

/// Mutable state of one pipeline run. Strictly sequential.
struct Session {
  explicit Session(const PipelineConfig& c) : cfg(c) {}
  const PipelineConfig& cfg;
  ChatTranscript transcript;
  std::vector<std::string> warnings;
};

std::string build_generation_prompt(std::string_view requirement, const PipelineConfig& cfg);
std::string build_refinement_prompt(std::string_view requirement, std::string_view model_text);
std::string build_repair_prompt(const std::vector<ParseError>& errors, bool block_missing);
std::string build_revision_prompt(std::string_view model_text, const std::vector<ReviewSuggestion>& suggestions);
std::string build_fix_prompt(std::string_view text, std::string_view machine_report);

/// sha256 of the canonical rendering.
std::string model_hash(const ProcessModel& model);

ProcessModel run_generation(std::string_view requirement, Session& session);
ProcessModel run_refinement(const ProcessModel& model, std::string_view requirement, Session& session);

struct ReviewRound {
  int round = 0;
  ReviewReply::Kind outcome = ReviewReply::Kind::ParseFailure;
  std::vector<ReviewSuggestion> suggestions;
  std::vector<std::string> warnings;
  std::string model_hash;  // after the round
};

struct ReviewLog {
  std::vector<ReviewRound> rounds;
  bool stalled = false;
  /// Set when the expert's revision could not be parsed and the loop stopped.
  std::optional<std::string> aborted;
};

struct ReviewOutcome {
  ProcessModel model;
  ReviewLog log;
};

ReviewOutcome run_reviewing(const ProcessModel& model, std::string_view requirement, Session& session);

struct TestOutcome {
  std::string text;  // the last validated text
  std::optional<ProcessModel> model;
  std::vector<ValidationReport> reports;  // one per validation, last = final
  int fix_rounds = 0;
  [[nodiscard]] bool clean() const { return !reports.empty() && reports.back().clean; }
};

TestOutcome run_testing(std::string_view text, Session& session);

struct PipelineResult {
  std::optional<ProcessModel> final_model;
  std::string final_text;
  ChatTranscript transcript;
  std::optional<ReviewLog> review;
  std::vector<ValidationReport> test_reports;
  /// Absent when Testing is disabled.
  std::optional<bool> clean;
  std::vector<std::string> warnings;
  int generation_attempts = 0;
};

/// Throws PipelineError (with the partial transcript) when a phase fails or
/// the backend gives up.
PipelineResult run_pipeline(std::string_view requirement, const PipelineConfig& cfg);

/// Deterministic report: phases, review rounds, test reports, clean flag.
nlohmann::json to_json(const PipelineResult& result);

}  // namespace mao
