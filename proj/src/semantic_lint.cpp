#include "mao/semantic_lint.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "mao/text.hpp"

namespace mao {

std::string_view to_string(LintCode code) {
  switch (code) {
    case LintCode::SH1: return "SH1";
    case LintCode::SH2: return "SH2";
    case LintCode::SH3: return "SH3";
    case LintCode::SH4: return "SH4";
  }
  return "?";
}

const std::vector<LintCategory>& lint_categories() {
  static const std::vector<LintCategory> categories = {
      {LintCode::SH1, "out of sequence",
       "activities occurring out of sequence: one activity is placed before another although the "
       "real process needs them the other way round",
       "\"go to the mailing point to send\" is modeled first, but \"prepare to send a package\" has "
       "to happen before it"},
      {LintCode::SH2, "irrelevant activity",
       "an activity that sounds related to the domain but does not contribute to the process, "
       "including needless repetitions of another activity",
       "\"delivery system\" names a piece of software, it is not a step anyone performs"},
      {LintCode::SH3, "gateway error",
       "the gateway type contradicts how its branches relate, e.g. alternatives modeled as parallel "
       "work or mandatory steps modeled as a choice",
       "\"confirm the pickup location\" and \"assign a courier for pickup\" must both happen, yet "
       "they sit on alternative branches of an exclusive gateway"},
      {LintCode::SH4, "branch membership error",
       "an activity sits inside a gateway branch although it belongs outside the gateway, or the "
       "other way round, or it sits in the wrong branch",
       "\"assign a courier for pickup\" only applies to home pickup, so it belongs in the upper "
       "(home pickup) branch, not next to \"go to the mailing point to send\""},
  };
  return categories;
}

std::string format_suggestion(const ReviewSuggestion& s) {
  std::string ids;
  for (const auto& t : s.targets) {
    if (!ids.empty()) ids += ",";
    ids += t;
  }
  return std::string(to_string(s.category)) + " | " + ids + " | " + s.proposal;
}

namespace {

std::string signature(const std::vector<Node>& nodes);

std::string signature(const Node& node) {
  if (node.is_activity()) {
    const Activity& a = node.activity();
    return "A(" + normalize_label(a.action) + "|" + normalize_label(a.role) + "|" +
           (a.object ? normalize_label(*a.object) : std::string("-")) + ")";
  }
  const Gateway& g = node.gateway();
  std::string s = std::string(gateway_tag(g.kind)) + "[";
  for (const Branch& b : g.branches) s += "{" + signature(b.children) + "}";
  return s + "]";
}

std::string signature(const std::vector<Node>& nodes) {
  std::string s;
  for (const Node& n : nodes) s += signature(n) + ";";
  return s;
}

}  // namespace

std::vector<ReviewSuggestion> deterministic_lint(const ProcessModel& model) {
  std::vector<ReviewSuggestion> found;
  std::map<std::string, std::size_t> order;  // id -> document index
  std::vector<std::string> action_order;
  std::map<std::string, std::vector<std::string>> by_action;
  std::map<std::string, std::string> shown_action;

  for_each_node(model, [&](const Node& node, const std::string&) {
    order.emplace(node.id(), order.size());
    if (node.is_activity()) {
      const std::string key = normalize_label(node.activity().action);
      if (key.empty()) return;
      if (!by_action.count(key)) {
        action_order.push_back(key);
        shown_action[key] = std::string(trim(node.activity().action));
      }
      by_action[key].push_back(node.id());
      return;
    }
    const Gateway& g = node.gateway();
    std::vector<std::size_t> empty;
    std::map<std::string, std::vector<std::size_t>> same;
    std::vector<std::string> sig_order;
    for (std::size_t b = 0; b < g.branches.size(); ++b) {
      if (g.branches[b].children.empty()) empty.push_back(b + 1);
      const std::string sig = signature(g.branches[b].children);
      if (!same.count(sig)) sig_order.push_back(sig);
      same[sig].push_back(b + 1);
    }
    for (const auto& sig : sig_order) {
      const auto& group = same[sig];
      if (group.size() < 2) continue;
      std::string list;
      for (std::size_t i : group) list += (list.empty() ? "" : ", ") + std::to_string(i);
      found.push_back({LintCode::SH3,
                       {g.id},
                       "branches " + list + " of " + std::string(gateway_tag(g.kind)) + " \"" + g.id +
                           "\" are identical; check whether the gateway type is right or merge "
                           "the duplicated branches"});
    }
    if (!empty.empty()) {
      std::string list;
      for (std::size_t i : empty) list += (list.empty() ? "" : ", ") + std::to_string(i);
      found.push_back({LintCode::SH4,
                       {g.id},
                       "branch " + list + " of \"" + g.id +
                           "\" contains no activity; move the activities that belong to it inside "
                           "or confirm that skipping is intended"});
    }
  });

  for (const auto& key : action_order) {
    const auto& ids = by_action[key];
    if (ids.size() < 2) continue;
    found.push_back({LintCode::SH2, ids,
                     "\"" + shown_action[key] + "\" appears " + std::to_string(ids.size()) +
                         " times; keep one occurrence or rename the others if they are distinct "
                         "steps"});
  }

  std::stable_sort(found.begin(), found.end(), [&](const auto& a, const auto& b) {
    return order[a.targets.front()] < order[b.targets.front()];
  });
  return found;
}

std::string build_review_prompt(std::string_view model_text, const std::vector<LintCategory>& categories,
                                const std::vector<ReviewSuggestion>& seeds) {
  std::ostringstream os;
  os << "Review the following process model, written in BPMN text, for semantic hallucinations: "
        "logical errors that make the model disagree with how the process really works.\n\n";
  os << "Model under review:\n" << model_text;
  if (!model_text.empty() && model_text.back() != '\n') os << "\n";
  os << "\nCategories of semantic hallucination:\n";
  for (const LintCategory& c : categories) {
    os << to_string(c.code) << " (" << c.name << "): " << c.description << ".\n";
    os << "  Example: " << c.example << ".\n";
  }
  if (!seeds.empty()) {
    os << "\nAutomatic checks raised these leads. Confirm them if they are real problems, ignore "
          "them otherwise:\n";
    for (const auto& s : seeds) os << format_suggestion(s) << "\n";
  }
  os << "\nAnswer format:\n"
     << "- If you find no semantic hallucination, answer with the single line " << kNoIssues << "\n"
     << "- Otherwise write one line per problem, exactly in the form\n"
     << "  SHk | id[,id...] | what the process design expert should change\n"
     << "  where SHk is one of the category codes above and the ids are element ids from the "
        "model.\n";
  return os.str();
}

namespace {

std::string_view strip_list_marker(std::string_view line) {
  line = trim(line);
  if (!line.empty() && (line.front() == '-' || line.front() == '*')) {
    line.remove_prefix(1);
    return trim(line);
  }
  std::size_t digits = 0;
  while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
  if (digits > 0 && digits < line.size() && (line[digits] == '.' || line[digits] == ')')) {
    line.remove_prefix(digits + 1);
    return trim(line);
  }
  return line;
}

bool is_sentinel(std::string_view line) {
  line = trim(line);
  while (!line.empty() && (line.front() == '`' || line.front() == '*')) line.remove_prefix(1);
  while (!line.empty() && (line.back() == '`' || line.back() == '*' || line.back() == '.')) {
    line.remove_suffix(1);
  }
  return line == kNoIssues;
}

}  // namespace

ReviewReply parse_review_reply(std::string_view reply, const ProcessModel& model) {
  ReviewReply out;
  const auto ids = collect_ids(model);
  const std::set<std::string> known(ids.begin(), ids.end());
  bool sentinel = false;
  bool well_formed = false;
  constexpr std::string_view kSep = " | ";

  for (const std::string& raw : split_lines(reply)) {
    if (is_sentinel(raw)) {
      sentinel = true;
      continue;
    }
    const std::string_view line = strip_list_marker(raw);
    const auto first = line.find(kSep);
    if (first == std::string_view::npos) continue;
    const auto second = line.find(kSep, first + kSep.size());
    if (second == std::string_view::npos) continue;
    const std::string_view code = trim(line.substr(0, first));
    const std::string_view target_list = trim(line.substr(first + kSep.size(), second - first - kSep.size()));
    const std::string_view proposal = trim(line.substr(second + kSep.size()));
    const auto& cats = lint_categories();
    auto cat = std::find_if(cats.begin(), cats.end(), [&](const auto& c) { return to_string(c.code) == code; });
    if (cat == cats.end() || proposal.empty() || target_list.empty()) continue;

    ReviewSuggestion s{cat->code, {}, std::string(proposal)};
    std::size_t start = 0;
    while (start <= target_list.size()) {
      auto comma = target_list.find(',', start);
      if (comma == std::string_view::npos) comma = target_list.size();
      const std::string_view id = trim(target_list.substr(start, comma - start));
      if (!id.empty()) s.targets.emplace_back(id);
      start = comma + 1;
    }
    if (s.targets.empty()) continue;
    well_formed = true;
    std::vector<std::string> unknown;
    for (const auto& t : s.targets) {
      if (!known.count(t)) unknown.push_back(t);
    }
    if (!unknown.empty()) {
      out.warnings.push_back("dropped suggestion naming unknown id(s) " + unknown.front() +
                             (unknown.size() > 1 ? ", ..." : "") + ": " + std::string(trim(raw)));
      continue;
    }
    out.suggestions.push_back(std::move(s));
  }

  if (well_formed) {
    out.kind = ReviewReply::Kind::Suggestions;
  } else if (sentinel) {
    out.kind = ReviewReply::Kind::NoIssues;
  } else {
    out.kind = ReviewReply::Kind::ParseFailure;
  }
  return out;
}

}  // namespace mao
