#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "mao/interop.hpp"
#include "mao/text.hpp"

namespace mao {

namespace pt = boost::property_tree;

namespace {

std::string_view local_name(std::string_view tag) {
  const auto colon = tag.find(':');
  return colon == std::string_view::npos ? tag : tag.substr(colon + 1);
}

std::optional<std::string> attribute(const pt::ptree& node, std::string_view name) {
  const auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return std::nullopt;
  for (const auto& [key, value] : *attrs) {
    if (local_name(key) == name) return value.data();
  }
  return std::nullopt;
}

const std::set<std::string_view> kTaskLike = {"task",        "userTask",   "serviceTask",      "sendTask",
                                              "receiveTask", "manualTask", "scriptTask",       "businessRuleTask",
                                              "callActivity"};

// Process children that carry no control flow.
const std::set<std::string_view> kIgnored = {
    "<xmlattr>",   "<xmlcomment>",  "documentation",     "extensionElements", "ioSpecification",
    "property",    "dataObject",    "dataObjectReference", "dataStoreReference", "textAnnotation",
    "association", "group",         "category",          "auditing",          "monitoring",
    "dataInputAssociation", "dataOutputAssociation"};

std::optional<GatewayKind> gateway_kind(std::string_view tag) {
  if (tag == "exclusiveGateway") return GatewayKind::Exclusive;
  if (tag == "parallelGateway") return GatewayKind::Parallel;
  if (tag == "inclusiveGateway") return GatewayKind::Inclusive;
  return std::nullopt;
}

std::size_t count_flow_nodes(const pt::ptree& process) {
  std::size_t n = 0;
  for (const auto& [tag, child] : process) {
    const auto name = local_name(tag);
    if (name != "sequenceFlow" && !kIgnored.count(name) && name != "laneSet") ++n;
  }
  return n;
}

struct Flow {
  std::string source;
  std::string target;
  std::optional<std::string> condition;
};

class Importer {
 public:
  ImportResult run(std::string_view xml) {
    pt::ptree doc;
    std::istringstream in{std::string(xml)};
    try {
      pt::read_xml(in, doc);
    } catch (const pt::xml_parser_error& e) {
      throw ImportError(std::string("malformed XML: ") + e.what());
    }

    const pt::ptree* root = &doc;
    for (const auto& [tag, child] : doc) {
      if (local_name(tag) == "definitions") root = &child;
    }

    std::vector<const pt::ptree*> processes;
    for (const auto& [tag, child] : *root) {
      const auto name = local_name(tag);
      if (name == "process") processes.push_back(&child);
      if (name == "collaboration") scan_collaboration(child);
    }
    if (processes.empty()) throw ImportError("no process element");

    const pt::ptree* chosen = processes.front();
    for (const pt::ptree* p : processes) {
      if (count_flow_nodes(*p) > count_flow_nodes(*chosen)) chosen = p;
    }
    for (const pt::ptree* p : processes) {
      if (p != chosen) warn("ignored additional process " + attribute(*p, "id").value_or("(no id)"));
    }

    out_.graph.name = attribute(*chosen, "name").value_or(attribute(*chosen, "id").value_or(""));
    read_process(*chosen);
    bridge_unsupported();
    build_edges();
    resolve_gateways();
    merge_terminals(FlatKind::Start);
    merge_terminals(FlatKind::End);

    if (const auto problems = out_.graph.check(); !problems.empty()) {
      throw ImportError("imported graph is not usable: " + problems.front());
    }
    return std::move(out_);
  }

 private:
  void warn(std::string w) { out_.warnings.push_back(std::move(w)); }

  void scan_collaboration(const pt::ptree& collab) {
    for (const auto& [tag, child] : collab) {
      if (local_name(tag) == "messageFlow") {
        warn("skipped messageFlow " + attribute(child, "id").value_or("(no id)"));
      }
    }
  }

  void scan_lanes(const pt::ptree& lane_set) {
    for (const auto& [tag, child] : lane_set) {
      if (local_name(tag) != "lane") continue;
      warn("skipped lane " + attribute(child, "name").value_or(attribute(child, "id").value_or("(no id)")));
      for (const auto& [t2, nested] : child) {
        if (local_name(t2) == "childLaneSet") scan_lanes(nested);
      }
    }
  }

  void add_node(FlatNode node) {
    if (unsupported_set_.count(node.id) || !known_.insert(node.id).second) {
      throw ImportError("duplicate element id " + node.id);
    }
    out_.graph.nodes.push_back(std::move(node));
  }

  void read_process(const pt::ptree& process) {
    for (const auto& [tag, child] : process) {
      const auto name = local_name(tag);
      if (kIgnored.count(name)) continue;
      if (name == "laneSet") {
        scan_lanes(child);
        continue;
      }
      const auto id = attribute(child, "id");
      if (name == "sequenceFlow") {
        Flow f{attribute(child, "sourceRef").value_or(""), attribute(child, "targetRef").value_or(""), {}};
        // The flow label is the readable condition; fall back to the expression.
        std::string cond = attribute(child, "name").value_or("");
        for (const auto& [t2, sub] : child) {
          if (cond.empty() && local_name(t2) == "conditionExpression") cond = std::string(trim(sub.data()));
        }
        if (!cond.empty()) f.condition = cond;
        flows_.push_back(std::move(f));
        continue;
      }
      if (!id) {
        warn("skipped " + std::string(name) + " without id");
        continue;
      }
      FlatNode node;
      node.id = *id;
      node.name = attribute(child, "name").value_or("");
      if (name == "startEvent") {
        node.kind = FlatKind::Start;
      } else if (name == "endEvent") {
        node.kind = FlatKind::End;
      } else if (kTaskLike.count(name) || name == "subProcess") {
        if (name == "subProcess") warn("subProcess " + *id + " imported as a single activity");
        node.kind = FlatKind::Activity;
        node.label = normalize_label(node.name);
        node.role = attribute(child, "role").value_or("");
        node.object = attribute(child, "object");
      } else if (auto kind = gateway_kind(name)) {
        node.kind = FlatKind::Split;  // settled by resolve_gateways
        node.gateway = *kind;
        direction_[*id] = attribute(child, "gatewayDirection").value_or("");
      } else {
        warn("skipped unsupported element " + std::string(name) + " " + *id);
        if (!unsupported_set_.insert(*id).second || known_.count(*id)) {
          throw ImportError("duplicate element id " + *id);
        }
        unsupported_.push_back(*id);
        continue;
      }
      add_node(std::move(node));
    }
  }

  // An unsupported node with one predecessor or one successor is replaced by
  // direct flows; otherwise it is dropped with its flows.
  void bridge_unsupported() {
    for (const std::string& u : unsupported_) {
      std::vector<Flow> in, out, rest;
      for (Flow& f : flows_) {
        if (f.target == u && f.source != u) {
          in.push_back(std::move(f));
        } else if (f.source == u && f.target != u) {
          out.push_back(std::move(f));
        } else if (f.source != u && f.target != u) {
          rest.push_back(std::move(f));
        }
      }
      if (in.size() <= 1 || out.size() <= 1) {
        for (const Flow& a : in) {
          for (const Flow& b : out) rest.push_back({a.source, b.target, a.condition ? a.condition : b.condition});
        }
      } else {
        warn("dropped flows around " + u + " (" + std::to_string(in.size()) + " in, " +
             std::to_string(out.size()) + " out)");
      }
      flows_ = std::move(rest);
    }
  }

  void build_edges() {
    for (const Flow& f : flows_) {
      if (!known_.count(f.source) || !known_.count(f.target)) {
        warn("skipped sequenceFlow " + f.source + " -> " + f.target + " with unknown endpoint");
        continue;
      }
      out_.graph.edges.insert({f.source, f.target});
      if (f.condition) out_.graph.conditions.emplace(FlatEdge{f.source, f.target}, *f.condition);
    }
  }

  void resolve_gateways() {
    std::map<std::string, int> in, out;
    for (const auto& [a, b] : out_.graph.edges) {
      ++out[a];
      ++in[b];
    }
    for (FlatNode& n : out_.graph.nodes) {
      if (n.kind != FlatKind::Split) continue;
      const std::string& dir = direction_[n.id];
      if (dir == "Diverging") continue;
      if (dir == "Converging" || in[n.id] > out[n.id]) n.kind = FlatKind::Join;
    }
    // Conditions only mean something on edges leaving a split.
    for (auto it = out_.graph.conditions.begin(); it != out_.graph.conditions.end();) {
      const FlatNode* src = out_.graph.find(it->first.first);
      it = src->kind == FlatKind::Split ? std::next(it) : out_.graph.conditions.erase(it);
    }
  }

  // Several start (end) events are replaced by one synthetic event wired to
  // their successors (predecessors).
  void merge_terminals(FlatKind kind) {
    FlatGraph& g = out_.graph;
    std::vector<std::string> ids;
    for (const FlatNode& n : g.nodes) {
      if (n.kind == kind) ids.push_back(n.id);
    }
    const char* what = kind == FlatKind::Start ? "start" : "end";
    if (ids.empty()) throw ImportError(std::string("process has no ") + what + " event");
    if (ids.size() == 1) return;
    warn("merged " + std::to_string(ids.size()) + " " + what + " events into one");

    const std::set<std::string> old(ids.begin(), ids.end());
    std::string fresh = kind == FlatKind::Start ? std::string(kStartId) : std::string(kEndId);
    for (int k = 2; known_.count(fresh); ++k) {
      fresh = (kind == FlatKind::Start ? std::string(kStartId) : std::string(kEndId)) + "_" + std::to_string(k);
    }
    known_.insert(fresh);

    std::set<FlatEdge> edges;
    for (const auto& e : g.edges) {
      const bool from_old = old.count(e.first) > 0;
      const bool to_old = old.count(e.second) > 0;
      if (kind == FlatKind::Start && from_old) {
        if (!to_old) edges.insert({fresh, e.second});
      } else if (kind == FlatKind::End && to_old) {
        if (!from_old) edges.insert({e.first, fresh});
      } else if (!from_old && !to_old) {
        edges.insert(e);
      }
    }
    g.edges = std::move(edges);
    g.nodes.erase(std::remove_if(g.nodes.begin(), g.nodes.end(), [&](const FlatNode& n) { return old.count(n.id); }),
                  g.nodes.end());
    FlatNode synthetic;
    synthetic.id = fresh;
    synthetic.kind = kind;
    if (kind == FlatKind::Start) {
      g.nodes.insert(g.nodes.begin(), std::move(synthetic));
    } else {
      g.nodes.push_back(std::move(synthetic));
    }
  }

  ImportResult out_;
  std::set<std::string> known_;
  std::vector<std::string> unsupported_;
  std::set<std::string> unsupported_set_;
  std::vector<Flow> flows_;
  std::map<std::string, std::string> direction_;
};

}  // namespace

ImportResult import_xml(std::string_view xml) { return Importer().run(xml); }

}  // namespace mao
