#include <sstream>

#include "mao/dsl.hpp"
#include "mao/pipeline.hpp"
#include "mao/text.hpp"

namespace mao {

namespace {

constexpr std::string_view kFormat =
    "Process format (BPMN text):\n"
    "- The whole model is one <process name=\"...\"> element. Its children run in order, from an implicit "
    "start event to an implicit end event.\n"
    "- <activity role=\"...\" action=\"...\" id=\"...\"/> is one task: who does it (role), what is done "
    "(action) and a unique id. An optional object=\"...\" names the thing being handled.\n"
    "- <exclusiveGateway id=\"...\">, <parallelGateway id=\"...\"> and <inclusiveGateway id=\"...\"> split "
    "the flow. Each path is a <branch> holding its own sequence of activities and gateways; the paths meet "
    "again at the closing tag.\n"
    "- Exclusive branches (exactly one path is taken) and inclusive branches (one or more paths are taken) "
    "need condition=\"...\". Parallel branches (all paths run) take no condition.\n"
    "- Attribute values are double-quoted. Only the tags and attributes above are allowed.\n";

constexpr std::string_view kDelivery =
    "<process name=\"delivery\">\n"
    "  <activity role=\"customer\" action=\"prepare to send a package\" id=\"a1\"/>\n"
    "  <exclusiveGateway id=\"g1\">\n"
    "    <branch condition=\"home pickup\">\n"
    "      <activity role=\"system\" action=\"assign a courier for pickup\" id=\"a2\"/>\n"
    "    </branch>\n"
    "    <branch condition=\"self-service\">\n"
    "      <activity role=\"customer\" action=\"go to the mailing point to send\" id=\"a3\"/>\n"
    "    </branch>\n"
    "  </exclusiveGateway>\n"
    "  <activity role=\"courier\" action=\"deliver the package\" id=\"a4\"/>\n"
    "</process>\n";

constexpr std::string_view kRefinementExample =
    "Example of refinement. Before:\n"
    "  <activity role=\"clerk\" action=\"handle the order\" id=\"a2\"/>\n"
    "After:\n"
    "  <activity role=\"clerk\" action=\"check the stock\" id=\"a2\"/>\n"
    "  <exclusiveGateway id=\"g2\">\n"
    "    <branch condition=\"in stock\">\n"
    "      <activity role=\"clerk\" action=\"pack the goods\" id=\"a5\"/>\n"
    "    </branch>\n"
    "    <branch condition=\"out of stock\">\n"
    "      <activity role=\"clerk\" action=\"notify the customer of the delay\" id=\"a6\"/>\n"
    "    </branch>\n"
    "  </exclusiveGateway>\n";

std::string system_prompt(Role role) {
  std::ostringstream os;
  switch (role) {
    case Role::TeamLeader:
      os << "You are the team leader of a process modeling team. You turn the user's requirement into "
            "instructions for the process design expert and the process reviewer, and you forward their "
            "results between them. You do not write models yourself.\n";
      break;
    case Role::ProcessDesignExpert:
      os << "You are a process design expert. You write business process models in BPMN text. Always "
            "answer with the complete model in one <process>...</process> block; text outside the block is "
            "ignored.\n";
      break;
    case Role::ProcessReviewer:
      os << "You are a process reviewer. You check process models for logical mistakes against the "
            "requirement and, when asked, run the format tools you are given. Follow the requested answer "
            "format exactly.\n";
      break;
  }
  os << "\n" << kFormat;
  return os.str();
}

}  // namespace

std::string_view to_string(Role r) {
  switch (r) {
    case Role::TeamLeader: return "TeamLeader";
    case Role::ProcessDesignExpert: return "ProcessDesignExpert";
    case Role::ProcessReviewer: return "ProcessReviewer";
  }
  return "?";
}

const RoleCard& role_card(Role role) {
  static const RoleCard cards[] = {
      {Role::TeamLeader, Stance::Instructor, system_prompt(Role::TeamLeader)},
      {Role::ProcessDesignExpert, Stance::Assistant, system_prompt(Role::ProcessDesignExpert)},
      {Role::ProcessReviewer, Stance::Assistant, system_prompt(Role::ProcessReviewer)},
  };
  return cards[static_cast<int>(role)];
}

std::vector<std::string> PipelineConfig::default_examples() { return {std::string(kDelivery)}; }

std::string build_generation_prompt(std::string_view requirement, const PipelineConfig& cfg) {
  if (trim(requirement).empty()) throw std::invalid_argument("requirement is empty");
  std::ostringstream os;
  os << "Requirement:\n" << trim(requirement) << "\n\n";
  os << kFormat << "\n";
  os << "Process constraints:\n" << cfg.registry.render_numbered() << "\n";
  for (std::size_t i = 0; i < cfg.few_shot_examples.size(); ++i) {
    os << "Example " << i + 1 << ":\n" << cfg.few_shot_examples[i];
    if (!cfg.few_shot_examples[i].empty() && cfg.few_shot_examples[i].back() != '\n') os << "\n";
    os << "\n";
  }
  os << "Write the process model for the requirement. Let's think step by step, then give the final model "
        "as one <process> block.\n";
  return os.str();
}

std::string build_refinement_prompt(std::string_view requirement, std::string_view model_text) {
  std::ostringstream os;
  os << "Requirement:\n" << trim(requirement) << "\n\n";
  os << "Current model:\n" << model_text;
  if (!model_text.empty() && model_text.back() != '\n') os << "\n";
  os << "\nRefine this model. Split activities that hide several steps into sub-activities and add gateways "
        "where the requirement implies a decision or parallel work. Keep existing ids where the activity "
        "stays, and give new elements new ids.\n\n"
     << kRefinementExample << "\nAnswer with the complete refined model as one <process> block.\n";
  return os.str();
}

std::string build_repair_prompt(const std::vector<ParseError>& errors, bool block_missing) {
  std::ostringstream os;
  if (block_missing) {
    os << "Your reply contains no <process>...</process> block. ";
  } else {
    os << "Your model could not be read:\n";
    for (const ParseError& e : errors) os << "- " << format_error(e) << "\n";
  }
  os << "Answer again with the complete model as one <process> block.\n";
  return os.str();
}

std::string build_revision_prompt(std::string_view model_text, const std::vector<ReviewSuggestion>& suggestions) {
  std::ostringstream os;
  os << "The process reviewer found these problems in the model:\n";
  for (const ReviewSuggestion& s : suggestions) os << format_suggestion(s) << "\n";
  os << "\nCurrent model:\n" << model_text;
  if (!model_text.empty() && model_text.back() != '\n') os << "\n";
  os << "\nRevise the model to address them and answer with the complete model as one <process> block.\n";
  return os.str();
}

std::string build_fix_prompt(std::string_view text, std::string_view machine_report) {
  std::ostringstream os;
  os << "The validator reported format errors in the model. Each entry gives the rule, the location and a "
        "suggested change:\n"
     << machine_report;
  if (!machine_report.empty() && machine_report.back() != '\n') os << "\n";
  os << "\nModel:\n" << text;
  if (!text.empty() && text.back() != '\n') os << "\n";
  os << "\nFix every reported problem and answer with the complete model as one <process> block.\n";
  return os.str();
}

}  // namespace mao
