// BPMN text: the compact XML-like process notation exchanged with agents.
//
//   <process name="delivery">
//     <activity role="customer" action="prepare to send a package" id="a1"/>
//     <exclusiveGateway id="g1">
//       <branch condition="home pickup">
//         <activity role="system" action="assign a courier for pickup" id="a2"/>
//       </branch>
//       <branch condition="self-service">
//         <activity role="customer" action="go to the mailing point to send" id="a3"/>
//       </branch>
//     </exclusiveGateway>
//   </process>
//
// Tags: process, activity, exclusiveGateway, parallelGateway,
// inclusiveGateway, branch. Activities are empty elements; gateways and
// branches are containers. Whitespace between tags is insignificant.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mao/model.hpp"

namespace mao {

struct SourcePos {
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in bytes
  std::size_t offset = 0;  // byte offset

  bool operator==(const SourcePos&) const = default;
};

struct SourceSpan {
  SourcePos start;
  SourcePos end;

  bool operator==(const SourceSpan&) const = default;
};

enum class ParseErrorKind {
  UnexpectedTag,
  UnclosedTag,
  UnknownAttribute,
  MissingAttribute,
  BadNesting,
  NotWellFormed,
};

/// Stable machine-readable code, e.g. "unclosed-tag".
std::string_view error_code(ParseErrorKind kind);

struct ParseError {
  SourceSpan span;
  ParseErrorKind kind;
  std::string message;
  /// Element the error concerns ("activity", "branch", ...), if any.
  std::string element;
  /// Attribute name for attribute errors.
  std::string attribute;
  /// Enclosing element for nesting errors.
  std::string parent;
  /// Tree path of the element the error concerns, when it has one.
  std::string path;
};

std::string format_error(const ParseError& err);

struct ParseOptions {
  /// Lenient mode downgrades unknown tags and attributes to warnings; unknown
  /// elements are skipped together with their content.
  bool lenient = false;
};

struct ParseOutcome {
  /// Present when the tree could be built. With attribute-level errors the
  /// model is still built (missing values left empty) so that downstream
  /// checks can run; `ok()` is false in that case.
  std::optional<ProcessModel> model;
  std::vector<ParseError> errors;
  std::vector<ParseError> warnings;
  /// Start-tag span for every element path, e.g. "/nodes/0" or
  /// "/nodes/1/branches/0". The process element is "/".
  std::map<std::string, SourceSpan> spans;

  [[nodiscard]] bool ok() const { return errors.empty() && model.has_value(); }
};

/// Total: never throws on any byte input.
ParseOutcome parse(std::string_view text, const ParseOptions& options = {});

class SerializeError : public std::runtime_error {
 public:
  SerializeError(const std::string& what, std::vector<StructuralDefect> defects)
      : std::runtime_error(what), defects_(std::move(defects)) {}
  [[nodiscard]] const std::vector<StructuralDefect>& defects() const { return defects_; }

 private:
  std::vector<StructuralDefect> defects_;
};

/// Canonical text: 2-space indent, LF endings, trailing newline. Throws
/// SerializeError if structural_check reports anything.
std::string serialize(const ProcessModel& model);

/// Same layout without the structural gate. Used to show defective drafts to
/// agents; the output still parses back to the same tree.
std::string render_unchecked(const ProcessModel& model);

std::string escape_attribute(std::string_view value);

/// The last top-level <process ...>...</process> block in free text. An
/// unterminated trailing block is returned up to the end of the reply so the
/// parser can report where it broke.
std::optional<std::string> extract_model_block(std::string_view reply);

}  // namespace mao
