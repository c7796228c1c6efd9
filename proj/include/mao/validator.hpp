// Format checker for BPMN text: the external tool agents call to locate
// format hallucinations. Findings carry a tree path, a source line when the
// input was text, and a repair suggestion.
#pragma once

#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "mao/dsl.hpp"

namespace mao {

enum class Severity { Error, Warning };

std::string_view to_string(Severity s);

/// Declarative attribute check for rules added without code changes: the
/// attribute value (empty when absent) of every matching element must match
/// `require` and must not match `forbid`.
struct AttributePattern {
  std::string element;  // "activity", "branch", "process" or a gateway tag
  std::string attribute;
  std::optional<std::string> require;
  std::optional<std::string> forbid;
};

struct ConstraintRule {
  std::string code;
  std::string description;
  Severity severity = Severity::Error;
  std::string suggestion;
  std::optional<AttributePattern> pattern;
};

class RuleRegistry {
 public:
  /// C0..C8 built-ins.
  static RuleRegistry defaults();

  /// Throws std::invalid_argument on a duplicate code or a bad pattern.
  void add(ConstraintRule rule);

  /// Adds pattern rules from a JSON array of
  /// {"code","description","severity","suggestion","element","attribute","require"?,"forbid"?}.
  void load_json(std::string_view json_text);

  [[nodiscard]] const std::vector<ConstraintRule>& rules() const { return rules_; }
  [[nodiscard]] const ConstraintRule* find(std::string_view code) const;

  /// Numbered list used in prompts: "C1. Every activity ..." one per line.
  [[nodiscard]] std::string render_numbered() const;

 private:
  struct CompiledPattern {
    std::string code;
    std::optional<std::regex> require;
    std::optional<std::regex> forbid;
  };

  std::vector<ConstraintRule> rules_;
  std::vector<CompiledPattern> compiled_;

  friend struct RegistryAccess;
};

struct Violation {
  std::string rule;
  Severity severity = Severity::Error;
  std::string path;
  std::optional<SourceSpan> span;
  std::string message;
  std::string suggestion;
};

struct ValidationReport {
  std::string subject;  // sha256 hex of the validated text
  std::vector<Violation> violations;
  bool clean = true;
};

struct ValidateOptions {
  /// Unknown tags/attributes become Warnings instead of Errors.
  bool lenient = false;
};

ValidationReport validate(std::string_view text, const RuleRegistry& registry,
                          const ValidateOptions& options = {});
ValidationReport validate(std::string_view text);

enum class ReportFormat { Human, Machine };

std::string render_report(const ValidationReport& report, ReportFormat format);

}  // namespace mao
