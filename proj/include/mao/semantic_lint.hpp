// Semantic hallucination taxonomy (SH1..SH4), cheap deterministic detectors
// that pre-seed the reviewer, and the reviewer's prompt/reply contract.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mao/model.hpp"

namespace mao {

enum class LintCode { SH1, SH2, SH3, SH4 };

std::string_view to_string(LintCode code);

struct LintCategory {
  LintCode code;
  std::string name;
  std::string description;
  std::string example;
};

/// The four categories, in code order.
const std::vector<LintCategory>& lint_categories();

struct ReviewSuggestion {
  LintCode category;
  std::vector<std::string> targets;
  std::string proposal;

  bool operator==(const ReviewSuggestion&) const = default;
};

/// "SH2 | a1,a4 | <proposal>"
std::string format_suggestion(const ReviewSuggestion& s);

/// Flags duplicate actions (SH2), empty branches (SH4) and gateways whose
/// branches are structurally identical (SH3). Heuristic only. Expects a model
/// that passes structural_check.
std::vector<ReviewSuggestion> deterministic_lint(const ProcessModel& model);

/// `model_text` is embedded verbatim; `seeds` are listed as leads for the reviewer.
std::string build_review_prompt(std::string_view model_text, const std::vector<LintCategory>& categories,
                                const std::vector<ReviewSuggestion>& seeds = {});

inline constexpr std::string_view kNoIssues = "NO_ISSUES";

struct ReviewReply {
  enum class Kind { NoIssues, Suggestions, ParseFailure };
  Kind kind = Kind::ParseFailure;
  std::vector<ReviewSuggestion> suggestions;
  /// Dropped lines (unknown ids) and similar notes.
  std::vector<std::string> warnings;
};

ReviewReply parse_review_reply(std::string_view reply, const ProcessModel& model);

}  // namespace mao
