#include "mao/validator.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "mao/text.hpp"

namespace mao {

using json = nlohmann::json;

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

namespace {

const std::vector<ConstraintRule>& builtin_rules() {
  static const std::vector<ConstraintRule> rules = {
      {"C0",
       "The BPMN text is well-formed: one <process> element, every tag closed and properly nested, "
       "attribute values double-quoted, and every required attribute present.",
       Severity::Error,
       "close every tag, nest elements properly and double-quote all attribute values",
       std::nullopt},
      {"C1", "Every activity and gateway has an id, and no two elements share the same id.",
       Severity::Error, "give every activity and gateway a unique, non-empty id", std::nullopt},
      {"C2", "Every gateway must include two branches or more.", Severity::Error,
       "add a second branch or remove the gateway", std::nullopt},
      {"C3", "Every activity has a non-empty action.", Severity::Error,
       "set the action attribute to the name of the work being done", std::nullopt},
      {"C4",
       "Every branch of an exclusiveGateway or inclusiveGateway has a non-empty condition attribute.",
       Severity::Error, "add a condition attribute stating when this branch is taken", std::nullopt},
      {"C5",
       "A <branch> appears only directly inside a gateway, and a gateway contains nothing but "
       "<branch> elements.",
       Severity::Error,
       "move the element so that branches sit directly inside a gateway and activities sit inside a "
       "branch",
       std::nullopt},
      {"C6",
       "Only the tags <process>, <activity>, <exclusiveGateway>, <parallelGateway>, "
       "<inclusiveGateway> and <branch> are used, each with its documented attributes only.",
       Severity::Error, "remove the unsupported tag or attribute", std::nullopt},
      {"C7", "The process contains at least one activity or gateway.", Severity::Error,
       "add the activities of the process between <process> and </process>", std::nullopt},
      {"C8", "Branches of a parallelGateway carry no condition, because all of them are taken.",
       Severity::Warning, "drop the condition attribute or use an exclusive/inclusive gateway",
       std::nullopt},
  };
  return rules;
}

std::optional<std::regex> compile(const std::optional<std::string>& pattern, const std::string& code) {
  if (!pattern) return std::nullopt;
  try {
    return std::regex(*pattern, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw std::invalid_argument("rule " + code + ": bad pattern \"" + *pattern + "\": " + e.what());
  }
}

}  // namespace

struct RegistryAccess {
  static const auto& compiled(const RuleRegistry& r) { return r.compiled_; }
};

RuleRegistry RuleRegistry::defaults() {
  RuleRegistry r;
  for (const auto& rule : builtin_rules()) r.add(rule);
  return r;
}

void RuleRegistry::add(ConstraintRule rule) {
  if (find(rule.code) != nullptr) {
    throw std::invalid_argument("duplicate rule code " + rule.code);
  }
  if (rule.pattern) {
    compiled_.push_back({rule.code, compile(rule.pattern->require, rule.code),
                         compile(rule.pattern->forbid, rule.code)});
  }
  rules_.push_back(std::move(rule));
}

void RuleRegistry::load_json(std::string_view json_text) {
  const json doc = json::parse(json_text);
  if (!doc.is_array()) throw std::invalid_argument("rule file must hold a JSON array");
  for (const json& item : doc) {
    ConstraintRule rule;
    rule.code = item.at("code").get<std::string>();
    rule.description = item.at("description").get<std::string>();
    const std::string sev = item.value("severity", "error");
    if (sev != "error" && sev != "warning") {
      throw std::invalid_argument("rule " + rule.code + ": severity must be error or warning");
    }
    rule.severity = sev == "error" ? Severity::Error : Severity::Warning;
    rule.suggestion = item.value("suggestion", "");
    if (rule.severity == Severity::Error && trim(rule.suggestion).empty()) {
      throw std::invalid_argument("rule " + rule.code + ": error rules need a suggestion");
    }
    AttributePattern pattern;
    pattern.element = item.at("element").get<std::string>();
    pattern.attribute = item.at("attribute").get<std::string>();
    if (item.contains("require")) pattern.require = item["require"].get<std::string>();
    if (item.contains("forbid")) pattern.forbid = item["forbid"].get<std::string>();
    if (!pattern.require && !pattern.forbid) {
      throw std::invalid_argument("rule " + rule.code + ": needs require or forbid");
    }
    rule.pattern = std::move(pattern);
    add(std::move(rule));
  }
}

const ConstraintRule* RuleRegistry::find(std::string_view code) const {
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const auto& r) { return r.code == code; });
  return it == rules_.end() ? nullptr : &*it;
}

std::string RuleRegistry::render_numbered() const {
  std::string out;
  for (const auto& r : rules_) {
    out += r.code + ". " + r.description;
    if (r.severity == Severity::Warning) out += " (recommendation)";
    out += "\n";
  }
  return out;
}

namespace {

class Collector {
 public:
  Collector(const RuleRegistry& registry, const ParseOutcome& parsed)
      : registry_(registry), parsed_(parsed) {}

  // Parser findings are all kept; a structural finding is dropped when the
  // parser already reported the same rule at the same path.
  void add(const std::string& code, const std::string& path, std::optional<SourceSpan> span,
           std::string message, std::string suggestion = {},
           std::optional<Severity> severity = std::nullopt) {
    const ConstraintRule* rule = registry_.find(code);
    if (rule == nullptr) return;  // rule removed from this registry
    if (!seen_.insert({code, path}).second && !span) return;
    Violation v;
    v.rule = code;
    v.severity = severity.value_or(rule->severity);
    v.path = path;
    v.span = span ? span : span_of(path);
    v.message = std::move(message);
    v.suggestion = suggestion.empty() ? rule->suggestion : std::move(suggestion);
    out_.push_back(std::move(v));
  }

  std::optional<SourceSpan> span_of(const std::string& path) const {
    auto it = parsed_.spans.find(path.empty() || path == "/nodes" ? "/" : path);
    if (it == parsed_.spans.end()) return std::nullopt;
    return it->second;
  }

  std::vector<Violation> take() { return std::move(out_); }

 private:
  const RuleRegistry& registry_;
  const ParseOutcome& parsed_;
  std::set<std::pair<std::string, std::string>> seen_;
  std::vector<Violation> out_;
};

bool is_gateway_tag(std::string_view tag) {
  return tag == "exclusiveGateway" || tag == "parallelGateway" || tag == "inclusiveGateway";
}

std::string rule_for(const ParseError& e) {
  switch (e.kind) {
    case ParseErrorKind::MissingAttribute:
      if (e.attribute == "action") return "C3";
      if (e.attribute == "condition") return "C4";
      if (e.attribute == "id") return "C1";
      return "C0";
    case ParseErrorKind::UnknownAttribute:
    case ParseErrorKind::UnexpectedTag: return "C6";
    case ParseErrorKind::BadNesting:
      return e.element == "branch" || is_gateway_tag(e.parent) ? "C5" : "C0";
    case ParseErrorKind::UnclosedTag:
    case ParseErrorKind::NotWellFormed: return "C0";
  }
  return "C0";
}

std::string suggestion_for(const ParseError& e) {
  switch (e.kind) {
    case ParseErrorKind::UnknownAttribute:
      return "remove the attribute \"" + e.attribute + "\" from <" + e.element + ">";
    case ParseErrorKind::UnexpectedTag:
      return "replace <" + e.element +
             "> with one of activity, exclusiveGateway, parallelGateway, inclusiveGateway, branch";
    case ParseErrorKind::UnclosedTag:
      return "add the closing tag </" + e.element + "> or write the element as <" + e.element + " .../>";
    case ParseErrorKind::MissingAttribute:
      if (e.attribute == "action" || e.attribute == "condition" || e.attribute == "id") return {};
      return "add the attribute " + e.attribute + "=\"...\" to <" + e.element + ">";
    default: return {};
  }
}

std::string rule_for(DefectKind kind) {
  switch (kind) {
    case DefectKind::EmptyId:
    case DefectKind::DuplicateId: return "C1";
    case DefectKind::BranchCount: return "C2";
    case DefectKind::EmptyAction: return "C3";
    case DefectKind::MissingCondition: return "C4";
    case DefectKind::EmptyProcess: return "C7";
  }
  return "C0";
}

bool attribute_level(const ParseError& e) {
  return e.kind == ParseErrorKind::MissingAttribute || e.kind == ParseErrorKind::UnknownAttribute;
}

struct PatternTarget {
  std::string element;
  std::string path;
  std::vector<std::pair<std::string, std::optional<std::string>>> attributes;
};

std::vector<PatternTarget> pattern_targets(const ProcessModel& model) {
  std::vector<PatternTarget> out;
  out.push_back({"process", "/", {{"name", model.name}}});
  for_each_node(model, [&](const Node& node, const std::string& path) {
    if (node.is_activity()) {
      const Activity& a = node.activity();
      out.push_back({"activity",
                     path,
                     {{"role", a.role}, {"action", a.action}, {"object", a.object}, {"id", a.id}}});
      return;
    }
    const Gateway& g = node.gateway();
    out.push_back({std::string(gateway_tag(g.kind)), path, {{"id", g.id}}});
    for (std::size_t b = 0; b < g.branches.size(); ++b) {
      out.push_back({"branch", path + "/branches/" + std::to_string(b),
                     {{"condition", g.branches[b].condition}}});
    }
  });
  return out;
}

}  // namespace

ValidationReport validate(std::string_view text, const RuleRegistry& registry,
                          const ValidateOptions& options) {
  ValidationReport report;
  report.subject = sha256_hex(text);

  const ParseOutcome parsed = parse(text, {.lenient = options.lenient});
  Collector collect(registry, parsed);
  for (const ParseError& e : parsed.errors) {
    collect.add(rule_for(e), e.path, e.span, e.message, suggestion_for(e));
  }
  for (const ParseError& e : parsed.warnings) {
    collect.add(rule_for(e), e.path, e.span, e.message, suggestion_for(e), Severity::Warning);
  }

  const bool tree_usable =
      parsed.model && std::all_of(parsed.errors.begin(), parsed.errors.end(), attribute_level);
  if (tree_usable) {
    const ProcessModel& model = *parsed.model;
    for (const StructuralDefect& d : structural_check(model)) {
      collect.add(rule_for(d.kind), d.path == "/nodes" ? "/" : d.path, std::nullopt, d.detail);
    }
    for_each_node(model, [&](const Node& node, const std::string& path) {
      if (!node.is_gateway() || node.gateway().kind != GatewayKind::Parallel) return;
      const auto& branches = node.gateway().branches;
      for (std::size_t b = 0; b < branches.size(); ++b) {
        if (branches[b].condition && !trim(*branches[b].condition).empty()) {
          collect.add("C8", path + "/branches/" + std::to_string(b), std::nullopt,
                      "parallel branch has condition \"" + *branches[b].condition + "\"");
        }
      }
    });

    const auto& compiled = RegistryAccess::compiled(registry);
    if (!compiled.empty()) {
      const auto targets = pattern_targets(model);
      for (const auto& cp : compiled) {
        const ConstraintRule& rule = *registry.find(cp.code);
        const AttributePattern& pat = *rule.pattern;
        for (const PatternTarget& t : targets) {
          const bool element_match =
              pat.element == t.element || (pat.element == "gateway" && is_gateway_tag(t.element));
          if (!element_match) continue;
          for (const auto& [name, value] : t.attributes) {
            if (name != pat.attribute) continue;
            const std::string v = value.value_or("");
            const bool bad = (cp.require && !std::regex_search(v, *cp.require)) ||
                             (cp.forbid && std::regex_search(v, *cp.forbid));
            if (bad) {
              collect.add(cp.code, t.path, std::nullopt,
                          "<" + t.element + "> attribute " + name + "=\"" + v + "\" breaks " +
                              cp.code + ": " + rule.description);
            }
          }
        }
      }
    }
  }

  report.violations = collect.take();
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const Violation& a, const Violation& b) {
                     if (a.span.has_value() != b.span.has_value()) return a.span.has_value();
                     if (a.span && a.span->start.offset != b.span->start.offset) {
                       return a.span->start.offset < b.span->start.offset;
                     }
                     return false;
                   });
  report.clean = std::none_of(report.violations.begin(), report.violations.end(),
                              [](const Violation& v) { return v.severity == Severity::Error; });
  return report;
}

ValidationReport validate(std::string_view text) {
  static const RuleRegistry registry = RuleRegistry::defaults();
  return validate(text, registry);
}

std::string render_report(const ValidationReport& report, ReportFormat format) {
  if (format == ReportFormat::Machine) {
    json doc;
    doc["subject"] = report.subject;
    doc["clean"] = report.clean;
    doc["violations"] = json::array();
    for (const Violation& v : report.violations) {
      json item;
      item["rule"] = v.rule;
      item["severity"] = std::string(to_string(v.severity));
      item["location"] = v.path.empty() ? "/" : v.path;
      item["line"] = v.span ? json(v.span->start.line) : json(nullptr);
      item["message"] = v.message;
      item["suggestion"] = v.suggestion;
      doc["violations"].push_back(std::move(item));
    }
    return doc.dump(2);
  }
  if (report.violations.empty()) return "OK: no format hallucinations found\n";
  std::string out;
  for (const Violation& v : report.violations) {
    out += v.rule + " at " + (v.path.empty() ? "/" : v.path);
    if (v.span) out += " (line " + std::to_string(v.span->start.line) + ")";
    if (v.severity == Severity::Warning) out += " [warning]";
    out += ": " + v.message;
    if (!v.suggestion.empty()) out += " — " + v.suggestion;
    out += "\n";
  }
  return out;
}

}  // namespace mao
