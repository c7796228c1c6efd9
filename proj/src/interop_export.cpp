#include <map>
#include <set>
#include <sstream>

#include "mao/dsl.hpp"
#include "mao/interop.hpp"

namespace mao {

namespace {

bool name_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool name_char(unsigned char c) { return name_start(c) || std::isdigit(c) || c == '-' || c == '.'; }

// XML ids must be NCNames; other characters are replaced and clashes suffixed.
class IdMap {
 public:
  std::string operator()(const std::string& id) {
    auto it = ids_.find(id);
    if (it != ids_.end()) return it->second;
    std::string out;
    for (unsigned char c : id) out.push_back(name_char(c) ? static_cast<char>(c) : '_');
    if (out.empty() || !name_start(static_cast<unsigned char>(out[0]))) out.insert(0, "_");
    std::string unique = out;
    for (int k = 2; used_.count(unique); ++k) unique = out + "_" + std::to_string(k);
    used_.insert(unique);
    return ids_[id] = unique;
  }

 private:
  std::map<std::string, std::string> ids_;
  std::set<std::string> used_;
};

std::string gateway_element(GatewayKind k) { return std::string(gateway_tag(k)); }

}  // namespace

std::string export_xml(const ProcessModel& model) {
  if (auto defects = structural_check(model); !defects.empty()) {
    std::string what = "cannot export a model with structural defects: " + defects.front().detail;
    throw SerializeError(what, std::move(defects));
  }
  return export_xml(flatten(model));
}

std::string export_xml(const FlatGraph& g) {
  IdMap id;
  for (const FlatNode& n : g.nodes) id(n.id);
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<definitions xmlns=\"http://www.omg.org/spec/BPMN/20100524/MODEL\""
     << " xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\""
     << " xmlns:mao=\"urn:mao:process-text\""
     << " id=\"Definitions_1\" targetNamespace=\"urn:mao:models\">\n";
  os << "  <process id=\"Process_1\" name=\"" << escape_attribute(g.name) << "\" isExecutable=\"false\">\n";
  for (const FlatNode& n : g.nodes) {
    os << "    ";
    switch (n.kind) {
      case FlatKind::Start: os << "<startEvent id=\"" << id(n.id) << "\"/>"; break;
      case FlatKind::End: os << "<endEvent id=\"" << id(n.id) << "\"/>"; break;
      case FlatKind::Activity:
        os << "<task id=\"" << id(n.id) << "\" name=\"" << escape_attribute(n.name) << "\" mao:role=\""
           << escape_attribute(n.role) << "\"";
        if (n.object) os << " mao:object=\"" << escape_attribute(*n.object) << "\"";
        os << "/>";
        break;
      case FlatKind::Split:
      case FlatKind::Join:
        os << "<" << gateway_element(n.gateway) << " id=\"" << id(n.id) << "\" name=\"" << escape_attribute(n.name)
           << "\" gatewayDirection=\"" << (n.kind == FlatKind::Split ? "Diverging" : "Converging") << "\"/>";
        break;
    }
    os << "\n";
  }
  int flow = 0;
  for (const FlatEdge& e : g.edges) {
    os << "    <sequenceFlow id=\"Flow_" << ++flow << "\" sourceRef=\"" << id(e.first) << "\" targetRef=\""
       << id(e.second) << "\"";
    auto cond = g.conditions.find(e);
    if (cond == g.conditions.end()) {
      os << "/>\n";
      continue;
    }
    const std::string text = escape_attribute(cond->second);
    os << " name=\"" << text << "\">\n"
       << "      <conditionExpression xsi:type=\"tFormalExpression\">" << text << "</conditionExpression>\n"
       << "    </sequenceFlow>\n";
  }
  os << "  </process>\n</definitions>\n";
  return os.str();
}

}  // namespace mao
