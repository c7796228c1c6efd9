#include <algorithm>
#include <cctype>
#include <variant>

#include "mao/dsl.hpp"
#include "mao/pipeline.hpp"
#include "mao/text.hpp"

namespace mao {

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Generation: return "Generation";
    case Phase::Refinement: return "Refinement";
    case Phase::Reviewing: return "Reviewing";
    case Phase::Testing: return "Testing";
  }
  return "?";
}

Phase parse_phase(std::string_view name) {
  for (Phase p : kAllPhases) {
    const auto s = to_string(p);
    if (s.size() == name.size() && starts_with_ci(name, s)) return p;
  }
  throw std::invalid_argument("unknown phase: " + std::string(name));
}

const ChatMessage& ChatTranscript::append(Phase phase, Role speaker, std::string content,
                                          std::optional<double> temperature) {
  messages_.push_back({messages_.size(), phase, speaker, std::move(content), temperature});
  return messages_.back();
}

std::size_t ChatTranscript::count(Phase phase) const {
  return static_cast<std::size_t>(
      std::count_if(messages_.begin(), messages_.end(), [&](const ChatMessage& m) { return m.phase == phase; }));
}

std::size_t ChatTranscript::count(Phase phase, Role speaker) const {
  return static_cast<std::size_t>(std::count_if(messages_.begin(), messages_.end(), [&](const ChatMessage& m) {
    return m.phase == phase && m.speaker == speaker;
  }));
}

std::string ChatTranscript::to_jsonl() const {
  std::string out;
  for (const ChatMessage& m : messages_) {
    nlohmann::ordered_json j;
    j["index"] = m.index;
    j["phase"] = to_string(m.phase);
    j["speaker"] = to_string(m.speaker);
    j["content"] = m.content;
    if (m.temperature) j["temperature"] = *m.temperature;
    out += j.dump() + "\n";
  }
  return out;
}

bool PipelineConfig::enabled(Phase p) const {
  switch (p) {
    case Phase::Generation: return true;
    case Phase::Refinement: return refinement;
    case Phase::Reviewing: return reviewing;
    case Phase::Testing: return testing;
  }
  return false;
}

void PipelineConfig::check() const {
  if (max_review_rounds < 1) throw std::invalid_argument("max_review_rounds must be >= 1");
  if (max_test_rounds < 1) throw std::invalid_argument("max_test_rounds must be >= 1");
  if (max_parse_retries < 0) throw std::invalid_argument("max_parse_retries must be >= 0");
  if (!backend) throw std::invalid_argument("no chat backend configured");
}

std::string model_hash(const ProcessModel& model) { return sha256_hex(render_unchecked(model)); }

namespace {

// One leader-to-agent chat chain within a phase.
class Conversation {
 public:
  Conversation(Session& s, Phase phase, Role agent, double temperature)
      : s_(s), phase_(phase), agent_(agent), temperature_(temperature) {
    wire_.push_back({"system", role_card(agent).system_prompt});
  }

  std::string ask(std::string instruction) {
    s_.transcript.append(phase_, Role::TeamLeader, instruction);
    wire_.push_back({"user", std::move(instruction)});
    std::string reply = s_.cfg.backend->complete({wire_, {temperature_}, std::string(to_string(phase_))});
    s_.transcript.append(phase_, agent_, reply, temperature_);
    wire_.push_back({"assistant", reply});
    return reply;
  }

 private:
  Session& s_;
  Phase phase_;
  Role agent_;
  double temperature_;
  std::vector<WireMessage> wire_;
};

struct Draft {
  ProcessModel model;
  std::string text;
};

struct Failure {
  std::string reason;
};

// Asks until a reply contains a block that parses (syntax only; structural
// defects are left for Testing).
std::variant<Draft, Failure> ask_for_model(Conversation& chat, std::string prompt, int retries) {
  std::string last_reason;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    const std::string reply = chat.ask(std::move(prompt));
    const auto block = extract_model_block(reply);
    if (!block) {
      last_reason = "reply contains no <process> block";
      prompt = build_repair_prompt({}, true);
      continue;
    }
    ParseOutcome parsed = parse(*block, {.lenient = true});
    if (parsed.ok()) return Draft{std::move(*parsed.model), *block};
    last_reason = parsed.errors.empty() ? "model could not be built" : format_error(parsed.errors.front());
    prompt = build_repair_prompt(parsed.errors, false);
  }
  return Failure{"no parseable model after " + std::to_string(retries + 1) + " attempts: " + last_reason};
}

std::string_view to_string(ReviewReply::Kind k) {
  switch (k) {
    case ReviewReply::Kind::NoIssues: return "NoIssues";
    case ReviewReply::Kind::Suggestions: return "Suggestions";
    case ReviewReply::Kind::ParseFailure: return "ParseFailure";
  }
  return "?";
}

}  // namespace

ProcessModel run_generation(std::string_view requirement, Session& session) {
  Conversation expert(session, Phase::Generation, Role::ProcessDesignExpert, session.cfg.expert_temperature);
  auto result = ask_for_model(expert, build_generation_prompt(requirement, session.cfg), session.cfg.max_parse_retries);
  if (auto* f = std::get_if<Failure>(&result)) {
    throw GenerationFailed(Phase::Generation, "generation failed: " + f->reason, session.transcript);
  }
  return std::move(std::get<Draft>(result).model);
}

ProcessModel run_refinement(const ProcessModel& model, std::string_view requirement, Session& session) {
  if (!session.cfg.enabled(Phase::Refinement)) return model;
  Conversation expert(session, Phase::Refinement, Role::ProcessDesignExpert, session.cfg.expert_temperature);
  auto result = ask_for_model(expert, build_refinement_prompt(requirement, render_unchecked(model)),
                              session.cfg.max_parse_retries);
  if (auto* f = std::get_if<Failure>(&result)) {
    if (!session.cfg.refinement_fallback) {
      throw RefinementFailed(Phase::Refinement, "refinement failed: " + f->reason, session.transcript);
    }
    session.warnings.push_back("refinement kept the input model: " + f->reason);
    return model;
  }
  return std::move(std::get<Draft>(result).model);
}

ReviewOutcome run_reviewing(const ProcessModel& model, std::string_view requirement, Session& session) {
  ReviewOutcome out{model, {}};
  if (!session.cfg.enabled(Phase::Reviewing)) return out;

  Conversation reviewer(session, Phase::Reviewing, Role::ProcessReviewer, session.cfg.reviewer_temperature);
  Conversation expert(session, Phase::Reviewing, Role::ProcessDesignExpert, session.cfg.expert_temperature);
  std::string hash = model_hash(out.model);

  for (int r = 1; r <= session.cfg.max_review_rounds; ++r) {
    const std::string text = render_unchecked(out.model);
    const auto seeds = structural_check(out.model).empty() ? deterministic_lint(out.model)
                                                           : std::vector<ReviewSuggestion>{};
    const std::string prompt = "Requirement:\n" + std::string(trim(requirement)) + "\n\n" +
                               build_review_prompt(text, lint_categories(), seeds);
    ReviewReply reply = parse_review_reply(reviewer.ask(prompt), out.model);

    ReviewRound round{r, reply.kind, reply.suggestions, reply.warnings, hash};
    if (reply.kind == ReviewReply::Kind::NoIssues) {
      out.log.rounds.push_back(std::move(round));
      break;
    }
    if (reply.kind == ReviewReply::Kind::ParseFailure || reply.suggestions.empty()) {
      out.log.rounds.push_back(std::move(round));
      continue;
    }

    auto revised = ask_for_model(expert, build_revision_prompt(text, reply.suggestions), session.cfg.max_parse_retries);
    if (auto* f = std::get_if<Failure>(&revised)) {
      out.log.aborted = f->reason;
      session.warnings.push_back("reviewing stopped, revision unusable: " + f->reason);
      out.log.rounds.push_back(std::move(round));
      break;
    }
    out.model = std::move(std::get<Draft>(revised).model);
    const std::string next = model_hash(out.model);
    round.model_hash = next;
    out.log.rounds.push_back(std::move(round));
    if (next == hash) {
      out.log.stalled = true;
      session.warnings.push_back("reviewing stalled: revision " + std::to_string(r) + " left the model unchanged");
      break;
    }
    hash = next;
  }
  return out;
}

TestOutcome run_testing(std::string_view text, Session& session) {
  TestOutcome out;
  out.text = std::string(text);
  if (!session.cfg.enabled(Phase::Testing)) return out;

  std::string tools = "Check the format of the model with one of your tools:\n";
  for (const auto& t : session.cfg.tools.tools) tools += "- " + t.name + ": " + t.description + "\n";
  session.transcript.append(Phase::Testing, Role::TeamLeader, tools);

  Conversation expert(session, Phase::Testing, Role::ProcessDesignExpert, session.cfg.expert_temperature);
  for (int round = 0;; ++round) {
    ValidationReport report = validate(out.text, session.cfg.registry);
    const std::string machine = render_report(report, ReportFormat::Machine);
    session.transcript.append(Phase::Testing, Role::ProcessReviewer, "[tool: validator]\n" + machine);
    const bool clean = report.clean;
    out.reports.push_back(std::move(report));
    if (clean || round == session.cfg.max_test_rounds) break;

    const std::string reply = expert.ask(build_fix_prompt(out.text, machine));
    const auto block = extract_model_block(reply);
    out.text = block ? *block : std::string(trim(reply));
    ++out.fix_rounds;
  }
  if (ParseOutcome parsed = parse(out.text); parsed.ok()) out.model = std::move(parsed.model);
  return out;
}

PipelineResult run_pipeline(std::string_view requirement, const PipelineConfig& cfg) {
  cfg.check();
  Session session(cfg);
  PipelineResult result;
  Phase phase = Phase::Generation;
  try {
    ProcessModel model = run_generation(requirement, session);
    result.generation_attempts = static_cast<int>(session.transcript.count(Phase::Generation, Role::ProcessDesignExpert));
    phase = Phase::Refinement;
    model = run_refinement(model, requirement, session);
    phase = Phase::Reviewing;
    if (cfg.reviewing) {
      ReviewOutcome reviewed = run_reviewing(model, requirement, session);
      model = std::move(reviewed.model);
      result.review = std::move(reviewed.log);
    }
    phase = Phase::Testing;
    if (cfg.testing) {
      TestOutcome tested = run_testing(render_unchecked(model), session);
      result.clean = tested.clean();
      result.final_model = std::move(tested.model);
      result.final_text = std::move(tested.text);
      result.test_reports = std::move(tested.reports);
      if (*result.clean && result.final_model) result.final_text = serialize(*result.final_model);
    } else {
      result.final_text = structural_check(model).empty() ? serialize(model) : render_unchecked(model);
      result.final_model = std::move(model);
    }
  } catch (PipelineError& e) {
    e.attach(session.transcript);
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(phase, std::string(to_string(phase)) + " phase failed: " + e.what(), session.transcript);
  }
  result.transcript = std::move(session.transcript);
  result.warnings = std::move(session.warnings);
  return result;
}

nlohmann::json to_json(const PipelineResult& r) {
  nlohmann::ordered_json j;
  j["phases"] = nlohmann::json::array();
  nlohmann::ordered_json counts;
  for (Phase p : kAllPhases) {
    const auto n = r.transcript.count(p);
    counts[std::string(to_string(p))] = n;
    if (n > 0) j["phases"].push_back(to_string(p));
  }
  j["messages"] = counts;
  j["generation_attempts"] = r.generation_attempts;
  if (r.review) {
    nlohmann::ordered_json review;
    review["rounds"] = nlohmann::json::array();
    for (const ReviewRound& rr : r.review->rounds) {
      nlohmann::ordered_json jr;
      jr["round"] = rr.round;
      jr["outcome"] = to_string(rr.outcome);
      jr["suggestions"] = nlohmann::json::array();
      for (const auto& s : rr.suggestions) jr["suggestions"].push_back(format_suggestion(s));
      jr["warnings"] = rr.warnings;
      jr["model_hash"] = rr.model_hash;
      review["rounds"].push_back(jr);
    }
    review["stalled"] = r.review->stalled;
    if (r.review->aborted) review["aborted"] = *r.review->aborted;
    j["review"] = review;
  }
  if (r.clean) {
    nlohmann::ordered_json testing;
    testing["validations"] = nlohmann::json::array();
    for (const ValidationReport& rep : r.test_reports) {
      testing["validations"].push_back(nlohmann::ordered_json::parse(render_report(rep, ReportFormat::Machine)));
    }
    j["testing"] = testing;
    j["clean"] = *r.clean;
  }
  j["warnings"] = r.warnings;
  j["final_sha256"] = sha256_hex(r.final_text);
  return j;
}

}  // namespace mao
