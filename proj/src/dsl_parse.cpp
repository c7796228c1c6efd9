// Hand-written parser for BPMN text. Two layers: a tolerant tag lexer that
// records byte spans and keeps going after malformed markup, and a tree
// builder that enforces the element grammar and attribute sets.
#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "mao/dsl.hpp"
#include "mao/text.hpp"

namespace mao {

std::string_view error_code(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::UnexpectedTag: return "unexpected-tag";
    case ParseErrorKind::UnclosedTag: return "unclosed-tag";
    case ParseErrorKind::UnknownAttribute: return "unknown-attribute";
    case ParseErrorKind::MissingAttribute: return "missing-attribute";
    case ParseErrorKind::BadNesting: return "bad-nesting";
    case ParseErrorKind::NotWellFormed: return "not-well-formed";
  }
  return "?";
}

std::string format_error(const ParseError& err) {
  return std::to_string(err.span.start.line) + ":" + std::to_string(err.span.start.column) + ": " +
         std::string(error_code(err.kind)) + ": " + err.message;
}

namespace {

class LineIndex {
 public:
  explicit LineIndex(std::string_view text) {
    starts_.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (text[i] == '\n') starts_.push_back(i + 1);
    }
  }

  [[nodiscard]] SourcePos at(std::size_t offset) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
    const std::size_t line = static_cast<std::size_t>(it - starts_.begin());
    return {line, offset - starts_[line - 1] + 1, offset};
  }

  [[nodiscard]] SourceSpan span(std::size_t begin, std::size_t end) const {
    return {at(begin), at(std::max(begin, end))};
  }

 private:
  std::vector<std::size_t> starts_;
};

struct Attribute {
  std::string name;
  std::string value;
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class TokenKind { StartTag, EndTag, Text, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string name;
  std::vector<Attribute> attributes;
  bool self_closing = false;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Lexer {
 public:
  Lexer(std::string_view text, const LineIndex& lines, std::vector<ParseError>& errors)
      : text_(text), lines_(lines), errors_(errors) {}

  Token next() {
    while (pos_ < text_.size()) {
      if (text_[pos_] != '<') {
        if (auto tok = lex_text()) return *tok;
        continue;
      }
      if (text_.compare(pos_, 4, "<!--") == 0) {
        skip_until(pos_, "-->", "unterminated comment");
        continue;
      }
      if (text_.compare(pos_, 2, "<?") == 0) {
        skip_until(pos_, "?>", "unterminated processing instruction");
        continue;
      }
      if (text_.compare(pos_, 2, "<!") == 0) {
        skip_until(pos_, ">", "unterminated declaration");
        continue;
      }
      if (text_.compare(pos_, 2, "</") == 0) {
        if (auto tok = lex_end_tag()) return *tok;
        continue;
      }
      if (auto tok = lex_start_tag()) return *tok;
    }
    Token end;
    end.kind = TokenKind::End;
    end.begin = end.end = text_.size();
    return end;
  }

 private:
  void error(std::size_t begin, std::size_t end, std::string message) {
    ParseError e;
    e.span = lines_.span(begin, std::min(end, text_.size()));
    e.kind = ParseErrorKind::NotWellFormed;
    e.message = std::move(message);
    errors_.push_back(std::move(e));
  }

  void skip_until(std::size_t begin, std::string_view terminator, const char* message) {
    const auto found = text_.find(terminator, begin + 2);
    if (found == std::string_view::npos) {
      error(begin, text_.size(), message);
      pos_ = text_.size();
    } else {
      pos_ = found + terminator.size();
    }
  }

  std::optional<Token> lex_text() {
    const std::size_t begin = pos_;
    const auto lt = text_.find('<', pos_);
    pos_ = lt == std::string_view::npos ? text_.size() : lt;
    const std::string_view chunk = text_.substr(begin, pos_ - begin);
    if (trim(chunk).empty()) return std::nullopt;
    Token tok;
    tok.kind = TokenKind::Text;
    tok.begin = begin;
    tok.end = pos_;
    return tok;
  }

  std::string lex_name() {
    const std::size_t begin = pos_;
    if (pos_ < text_.size() && is_name_start(text_[pos_])) {
      ++pos_;
      while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    }
    return std::string(text_.substr(begin, pos_ - begin));
  }

  void skip_ws() {
    while (pos_ < text_.size() && is_ws(text_[pos_])) ++pos_;
  }

  // Skips the rest of a broken tag. Stops before a '<' so the next tag is not
  // swallowed.
  void recover(std::size_t tag_begin, const std::string& message) {
    error(tag_begin, pos_ + 1, message);
    while (pos_ < text_.size() && text_[pos_] != '>' && text_[pos_] != '<') ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '>') ++pos_;
  }

  std::optional<Token> lex_end_tag() {
    const std::size_t begin = pos_;
    pos_ += 2;
    Token tok;
    tok.kind = TokenKind::EndTag;
    tok.name = lex_name();
    if (tok.name.empty()) {
      recover(begin, "malformed closing tag");
      return std::nullopt;
    }
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '>') {
      recover(begin, "malformed closing tag </" + tok.name);
      return std::nullopt;
    }
    ++pos_;
    tok.begin = begin;
    tok.end = pos_;
    return tok;
  }

  std::string decode_value(std::string_view raw, std::size_t raw_begin) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const char c = raw[i];
      if (c == '<') {
        error(raw_begin + i, raw_begin + i + 1, "'<' is not allowed in attribute values");
        out.push_back(c);
        continue;
      }
      if (c != '&') {
        out.push_back(c);
        continue;
      }
      const auto semi = raw.find(';', i);
      const std::string_view ent =
          semi == std::string_view::npos ? std::string_view{} : raw.substr(i + 1, semi - i - 1);
      bool ok = true;
      if (ent == "amp") {
        out.push_back('&');
      } else if (ent == "lt") {
        out.push_back('<');
      } else if (ent == "gt") {
        out.push_back('>');
      } else if (ent == "quot") {
        out.push_back('"');
      } else if (ent == "apos") {
        out.push_back('\'');
      } else if (ent.size() >= 2 && ent[0] == '#') {
        const bool hex = ent[1] == 'x' || ent[1] == 'X';
        const std::string_view digits = ent.substr(hex ? 2 : 1);
        unsigned long cp = 0;
        const auto res =
            std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
        ok = !digits.empty() && res.ec == std::errc{} && res.ptr == digits.data() + digits.size() &&
             cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
        if (ok) append_utf8(out, cp);
      } else {
        ok = false;
      }
      if (!ok) {
        const std::size_t stop = semi == std::string_view::npos ? i + 1 : semi + 1;
        error(raw_begin + i, raw_begin + stop, "invalid character reference");
        out.push_back('&');
        continue;
      }
      i = semi;
    }
    return out;
  }

  std::optional<Token> lex_start_tag() {
    const std::size_t begin = pos_;
    ++pos_;
    Token tok;
    tok.kind = TokenKind::StartTag;
    tok.name = lex_name();
    if (tok.name.empty()) {
      recover(begin, "'<' does not start a tag");
      return std::nullopt;
    }
    while (true) {
      const bool had_ws = pos_ < text_.size() && is_ws(text_[pos_]);
      skip_ws();
      if (pos_ >= text_.size()) {
        error(begin, text_.size(), "tag <" + tok.name + " is not terminated");
        return std::nullopt;
      }
      const char c = text_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') {
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          pos_ += 2;
          tok.self_closing = true;
          break;
        }
        recover(begin, "stray '/' in tag <" + tok.name);
        return std::nullopt;
      }
      if (!had_ws) {
        recover(begin, "attributes of <" + tok.name + "> must be separated by whitespace");
        return std::nullopt;
      }
      Attribute attr;
      attr.begin = pos_;
      attr.name = lex_name();
      if (attr.name.empty()) {
        recover(begin, "malformed attribute in tag <" + tok.name);
        return std::nullopt;
      }
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '=') {
        recover(begin, "attribute " + attr.name + " has no value");
        return std::nullopt;
      }
      ++pos_;
      skip_ws();
      if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) {
        recover(begin, "value of attribute " + attr.name + " must be quoted");
        return std::nullopt;
      }
      const char quote = text_[pos_++];
      const auto close = text_.find(quote, pos_);
      if (close == std::string_view::npos) {
        error(attr.begin, text_.size(), "unterminated value for attribute " + attr.name);
        pos_ = text_.size();
        return std::nullopt;
      }
      attr.value = decode_value(text_.substr(pos_, close - pos_), pos_);
      pos_ = close + 1;
      attr.end = pos_;
      const bool duplicate = std::any_of(tok.attributes.begin(), tok.attributes.end(),
                                         [&](const Attribute& a) { return a.name == attr.name; });
      if (duplicate) {
        error(attr.begin, attr.end, "duplicate attribute " + attr.name);
        continue;
      }
      tok.attributes.push_back(std::move(attr));
    }
    tok.begin = begin;
    tok.end = pos_;
    return tok;
  }

  std::string_view text_;
  const LineIndex& lines_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
};

enum class ElementType { Process, Activity, Gateway, Branch, Skip };

struct Frame {
  ElementType type = ElementType::Skip;
  std::string name;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string path;
  // Only one of these is in use depending on type.
  Activity activity;
  Gateway gateway;
  Branch branch;
};

std::optional<GatewayKind> gateway_kind(std::string_view tag) {
  if (tag == "exclusiveGateway") return GatewayKind::Exclusive;
  if (tag == "parallelGateway") return GatewayKind::Parallel;
  if (tag == "inclusiveGateway") return GatewayKind::Inclusive;
  return std::nullopt;
}

bool is_known_tag(std::string_view tag) {
  return tag == "process" || tag == "activity" || tag == "branch" || gateway_kind(tag).has_value();
}

class TreeBuilder {
 public:
  TreeBuilder(std::string_view text, const ParseOptions& options, ParseOutcome& out)
      : text_(text), options_(options), out_(out), lines_(text), lexer_(text, lines_, out.errors) {}

  void run() {
    while (true) {
      Token tok = lexer_.next();
      if (tok.kind == TokenKind::End) break;
      switch (tok.kind) {
        case TokenKind::Text: on_text(tok); break;
        case TokenKind::StartTag: on_start(std::move(tok)); break;
        case TokenKind::EndTag: on_end(tok); break;
        case TokenKind::End: break;
      }
    }
    while (!stack_.empty()) {
      const Frame& f = stack_.back();
      report(ParseErrorKind::UnclosedTag, f.begin, f.end, "<" + f.name + "> is never closed", f.name,
             "", f.path);
      pop();
    }
    if (!seen_process_) {
      report(ParseErrorKind::NotWellFormed, 0, text_.size(), "no <process> element found", "", "",
             "");
    }
  }

 private:
  void report(ParseErrorKind kind, std::size_t begin, std::size_t end, std::string message,
              std::string element, std::string attribute, std::string path, bool warning = false) {
    ParseError e;
    if (!stack_.empty()) e.parent = stack_.back().name;
    e.span = lines_.span(begin, std::min(end, text_.size()));
    e.kind = kind;
    e.message = std::move(message);
    e.element = std::move(element);
    e.attribute = std::move(attribute);
    e.path = std::move(path);
    (warning ? out_.warnings : out_.errors).push_back(std::move(e));
  }

  void on_text(const Token& tok) {
    if (!stack_.empty() && stack_.back().type == ElementType::Skip) return;
    report(ParseErrorKind::NotWellFormed, tok.begin, tok.end, "unexpected text outside of tags", "",
           "", stack_.empty() ? "" : stack_.back().path);
  }

  void push_skip(const Token& tok, const std::string& path) {
    if (tok.self_closing) return;
    Frame f;
    f.type = ElementType::Skip;
    f.name = tok.name;
    f.begin = tok.begin;
    f.end = tok.end;
    f.path = path;
    stack_.push_back(std::move(f));
  }

  // Returns the value of each allowed attribute; reports unknown ones.
  std::map<std::string, std::string> check_attributes(const Token& tok,
                                                      std::initializer_list<std::string_view> allowed,
                                                      const std::string& path) {
    std::map<std::string, std::string> values;
    for (const Attribute& a : tok.attributes) {
      if (std::find(allowed.begin(), allowed.end(), a.name) == allowed.end()) {
        report(ParseErrorKind::UnknownAttribute, a.begin, a.end,
               "unknown attribute \"" + a.name + "\" on <" + tok.name + ">", tok.name, a.name, path,
               options_.lenient);
        continue;
      }
      values[a.name] = a.value;
    }
    return values;
  }

  void require(const Token& tok, const std::map<std::string, std::string>& values,
               std::string_view attr, const std::string& path) {
    if (values.count(std::string(attr)) != 0) return;
    report(ParseErrorKind::MissingAttribute, tok.begin, tok.end,
           "<" + tok.name + "> is missing required attribute \"" + std::string(attr) + "\"",
           tok.name, std::string(attr), path);
  }

  // Path a new node would get under the current container.
  std::string child_path() const {
    const Frame& parent = stack_.back();
    if (parent.type == ElementType::Process) {
      return "/nodes/" + std::to_string(process_nodes_.size());
    }
    return parent.path + "/children/" + std::to_string(parent.branch.children.size());
  }

  void on_start(Token tok) {
    const std::string parent_path = stack_.empty() ? "" : stack_.back().path;
    if (!stack_.empty() && stack_.back().type == ElementType::Skip) {
      push_skip(tok, parent_path);
      return;
    }
    if (!is_known_tag(tok.name)) {
      report(ParseErrorKind::UnexpectedTag, tok.begin, tok.end, "unknown tag <" + tok.name + ">",
             tok.name, "", parent_path, options_.lenient);
      push_skip(tok, parent_path);
      return;
    }
    if (tok.name == "process") {
      start_process(tok);
      return;
    }
    if (stack_.empty()) {
      const std::string msg = done_ ? "<" + tok.name + "> appears after </process>"
                                    : "<" + tok.name + "> must be inside <process>";
      report(done_ ? ParseErrorKind::NotWellFormed : ParseErrorKind::BadNesting, tok.begin, tok.end,
             msg, tok.name, "", "");
      push_skip(tok, "");
      return;
    }
    const Frame& parent = stack_.back();
    if (tok.name == "branch") {
      if (parent.type != ElementType::Gateway) {
        report(ParseErrorKind::BadNesting, tok.begin, tok.end,
               "<branch> must be directly inside a gateway, found inside <" + parent.name + ">",
               tok.name, "", parent_path);
        push_skip(tok, parent_path);
        return;
      }
      start_branch(tok);
      return;
    }
    // activity or gateway
    if (parent.type == ElementType::Gateway || parent.type == ElementType::Activity) {
      const std::string why = parent.type == ElementType::Gateway
                                  ? "a gateway may only contain <branch> elements"
                                  : "<activity> cannot contain other elements";
      report(ParseErrorKind::BadNesting, tok.begin, tok.end,
             "<" + tok.name + "> is not allowed here: " + why, tok.name, "", parent_path);
      push_skip(tok, parent_path);
      return;
    }
    if (tok.name == "activity") {
      start_activity(tok);
    } else {
      start_gateway(tok);
    }
  }

  void start_process(const Token& tok) {
    if (!stack_.empty() || done_) {
      report(stack_.empty() ? ParseErrorKind::NotWellFormed : ParseErrorKind::BadNesting, tok.begin,
             tok.end, done_ ? "a second <process> element is not allowed" : "<process> cannot be nested",
             tok.name, "", stack_.empty() ? "" : stack_.back().path);
      push_skip(tok, stack_.empty() ? "" : stack_.back().path);
      return;
    }
    seen_process_ = true;
    const auto values = check_attributes(tok, {"name"}, "/");
    require(tok, values, "name", "/");
    out_.spans["/"] = lines_.span(tok.begin, tok.end);
    name_ = values.count("name") ? values.at("name") : std::string{};
    Frame f;
    f.type = ElementType::Process;
    f.name = tok.name;
    f.begin = tok.begin;
    f.end = tok.end;
    f.path = "";
    if (tok.self_closing) {
      finish_process();
      return;
    }
    stack_.push_back(std::move(f));
  }

  void start_activity(const Token& tok) {
    const std::string path = child_path();
    const auto values = check_attributes(tok, {"role", "action", "object", "id"}, path);
    require(tok, values, "role", path);
    require(tok, values, "action", path);
    require(tok, values, "id", path);
    Frame f;
    f.type = ElementType::Activity;
    f.name = tok.name;
    f.begin = tok.begin;
    f.end = tok.end;
    f.path = path;
    auto get = [&](const char* key) {
      auto it = values.find(key);
      return it == values.end() ? std::string{} : it->second;
    };
    f.activity.id = get("id");
    f.activity.role = get("role");
    f.activity.action = get("action");
    if (auto it = values.find("object"); it != values.end()) f.activity.object = it->second;
    out_.spans[path] = lines_.span(tok.begin, tok.end);
    stack_.push_back(std::move(f));
    if (tok.self_closing) pop();
  }

  void start_gateway(const Token& tok) {
    const std::string path = child_path();
    const auto values = check_attributes(tok, {"id"}, path);
    require(tok, values, "id", path);
    Frame f;
    f.type = ElementType::Gateway;
    f.name = tok.name;
    f.begin = tok.begin;
    f.end = tok.end;
    f.path = path;
    f.gateway.kind = *gateway_kind(tok.name);
    if (auto it = values.find("id"); it != values.end()) f.gateway.id = it->second;
    out_.spans[path] = lines_.span(tok.begin, tok.end);
    stack_.push_back(std::move(f));
    if (tok.self_closing) pop();
  }

  void start_branch(const Token& tok) {
    const Frame& gw = stack_.back();
    const std::string path = gw.path + "/branches/" + std::to_string(gw.gateway.branches.size());
    const auto values = check_attributes(tok, {"condition"}, path);
    if (gw.gateway.kind != GatewayKind::Parallel) require(tok, values, "condition", path);
    Frame f;
    f.type = ElementType::Branch;
    f.name = tok.name;
    f.begin = tok.begin;
    f.end = tok.end;
    f.path = path;
    if (auto it = values.find("condition"); it != values.end()) f.branch.condition = it->second;
    out_.spans[path] = lines_.span(tok.begin, tok.end);
    stack_.push_back(std::move(f));
    if (tok.self_closing) pop();
  }

  void on_end(const Token& tok) {
    auto match = std::find_if(stack_.rbegin(), stack_.rend(),
                              [&](const Frame& f) { return f.name == tok.name; });
    if (match == stack_.rend()) {
      if (!stack_.empty() && stack_.back().type == ElementType::Skip) return;
      report(ParseErrorKind::NotWellFormed, tok.begin, tok.end,
             "closing tag </" + tok.name + "> has no matching opening tag", tok.name, "",
             stack_.empty() ? "" : stack_.back().path);
      return;
    }
    // Inside skipped content, mismatches are not reported individually.
    const bool inside_skip = stack_.back().type == ElementType::Skip;
    const std::size_t depth = static_cast<std::size_t>(match - stack_.rbegin());
    for (std::size_t i = 0; i < depth; ++i) {
      const Frame& f = stack_.back();
      if (!inside_skip || f.type != ElementType::Skip) {
        report(ParseErrorKind::UnclosedTag, f.begin, f.end,
               "<" + f.name + "> is not closed before </" + tok.name + ">", f.name, "", f.path);
      }
      pop();
    }
    pop();
  }

  void pop() {
    Frame f = std::move(stack_.back());
    stack_.pop_back();
    switch (f.type) {
      case ElementType::Skip: return;
      case ElementType::Process: finish_process(); return;
      case ElementType::Activity: attach(Node(std::move(f.activity))); return;
      case ElementType::Gateway: attach(Node(std::move(f.gateway))); return;
      case ElementType::Branch:
        if (!stack_.empty() && stack_.back().type == ElementType::Gateway) {
          stack_.back().gateway.branches.push_back(std::move(f.branch));
        }
        return;
    }
  }

  void attach(Node node) {
    if (stack_.empty()) return;
    Frame& parent = stack_.back();
    if (parent.type == ElementType::Process) {
      process_nodes_.push_back(std::move(node));
    } else if (parent.type == ElementType::Branch) {
      parent.branch.children.push_back(std::move(node));
    }
  }

  void finish_process() {
    done_ = true;
    ProcessModel model;
    model.name = name_;
    model.nodes = std::move(process_nodes_);
    out_.model = std::move(model);
  }

  std::string_view text_;
  const ParseOptions& options_;
  ParseOutcome& out_;
  LineIndex lines_;
  Lexer lexer_;
  std::vector<Frame> stack_;
  std::vector<Node> process_nodes_;
  std::string name_;
  bool seen_process_ = false;
  bool done_ = false;
};

}  // namespace

ParseOutcome parse(std::string_view text, const ParseOptions& options) {
  ParseOutcome out;
  TreeBuilder builder(text, options, out);
  builder.run();
  auto by_offset = [](const ParseError& a, const ParseError& b) {
    return a.span.start.offset < b.span.start.offset;
  };
  std::stable_sort(out.errors.begin(), out.errors.end(), by_offset);
  std::stable_sort(out.warnings.begin(), out.warnings.end(), by_offset);
  return out;
}

}  // namespace mao
