#include <sstream>

#include "mao/dsl.hpp"

namespace mao {

std::string escape_attribute(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

namespace {

void write_nodes(std::ostringstream& os, const std::vector<Node>& nodes, int depth);

void indent(std::ostringstream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

void write_activity(std::ostringstream& os, const Activity& a, int depth) {
  indent(os, depth);
  os << "<activity role=\"" << escape_attribute(a.role) << "\" action=\"" << escape_attribute(a.action)
     << "\"";
  if (a.object) os << " object=\"" << escape_attribute(*a.object) << "\"";
  os << " id=\"" << escape_attribute(a.id) << "\"/>\n";
}

void write_gateway(std::ostringstream& os, const Gateway& g, int depth) {
  const std::string_view tag = gateway_tag(g.kind);
  indent(os, depth);
  os << "<" << tag << " id=\"" << escape_attribute(g.id) << "\"";
  if (g.branches.empty()) {
    os << "/>\n";
    return;
  }
  os << ">\n";
  for (const Branch& b : g.branches) {
    indent(os, depth + 1);
    os << "<branch";
    if (b.condition) os << " condition=\"" << escape_attribute(*b.condition) << "\"";
    if (b.children.empty()) {
      os << "/>\n";
      continue;
    }
    os << ">\n";
    write_nodes(os, b.children, depth + 2);
    indent(os, depth + 1);
    os << "</branch>\n";
  }
  indent(os, depth);
  os << "</" << tag << ">\n";
}

void write_nodes(std::ostringstream& os, const std::vector<Node>& nodes, int depth) {
  for (const Node& n : nodes) {
    if (n.is_activity()) {
      write_activity(os, n.activity(), depth);
    } else {
      write_gateway(os, n.gateway(), depth);
    }
  }
}

}  // namespace

std::string render_unchecked(const ProcessModel& model) {
  std::ostringstream os;
  os << "<process name=\"" << escape_attribute(model.name) << "\"";
  if (model.nodes.empty()) {
    os << "/>\n";
    return os.str();
  }
  os << ">\n";
  write_nodes(os, model.nodes, 1);
  os << "</process>\n";
  return os.str();
}

std::string serialize(const ProcessModel& model) {
  auto defects = structural_check(model);
  if (!defects.empty()) {
    const auto& d = defects.front();
    throw SerializeError("cannot serialize model with structural defects: " +
                             std::string(to_string(d.kind)) + " at " + d.path,
                         std::move(defects));
  }
  return render_unchecked(model);
}

namespace {

// Position just past "<process" when it starts a process tag at `pos`.
bool process_open_at(std::string_view s, std::size_t pos) {
  constexpr std::string_view kOpen = "<process";
  if (s.compare(pos, kOpen.size(), kOpen) != 0) return false;
  const std::size_t after = pos + kOpen.size();
  if (after >= s.size()) return true;
  const char c = s[after];
  return c == '>' || c == '/' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

// End of a tag that begins at `pos` (index past '>'), honoring quotes.
std::size_t tag_end(std::string_view s, std::size_t pos, bool& self_closing) {
  char quote = 0;
  for (std::size_t i = pos + 1; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      self_closing = s[i - 1] == '/';
      return i + 1;
    } else if (c == '<') {
      break;
    }
  }
  self_closing = false;
  return std::string_view::npos;
}

}  // namespace

std::optional<std::string> extract_model_block(std::string_view reply) {
  constexpr std::string_view kClose = "</process>";
  std::optional<std::string> last;
  std::size_t pos = 0;
  while (pos < reply.size()) {
    const auto start = reply.find("<process", pos);
    if (start == std::string_view::npos) break;
    if (!process_open_at(reply, start)) {
      pos = start + 1;
      continue;
    }
    bool self_closing = false;
    const auto open_end = tag_end(reply, start, self_closing);
    if (open_end == std::string_view::npos) {
      last = std::string(reply.substr(start));
      break;
    }
    if (self_closing) {
      last = std::string(reply.substr(start, open_end - start));
      pos = open_end;
      continue;
    }
    // Match nested <process> openings so the block ends at its own close tag.
    int depth = 1;
    std::size_t cursor = open_end;
    std::size_t block_end = std::string_view::npos;
    while (cursor < reply.size()) {
      const auto next_open = reply.find("<process", cursor);
      const auto next_close = reply.find(kClose, cursor);
      if (next_close == std::string_view::npos) break;
      if (next_open != std::string_view::npos && next_open < next_close &&
          process_open_at(reply, next_open)) {
        bool nested_self = false;
        const auto e = tag_end(reply, next_open, nested_self);
        if (!nested_self) ++depth;
        cursor = e == std::string_view::npos ? next_open + 1 : e;
        continue;
      }
      if (--depth == 0) {
        block_end = next_close + kClose.size();
        break;
      }
      cursor = next_close + kClose.size();
    }
    if (block_end == std::string_view::npos) {
      last = std::string(reply.substr(start));
      break;
    }
    last = std::string(reply.substr(start, block_end - start));
    pos = block_end;
  }
  return last;
}

}  // namespace mao
