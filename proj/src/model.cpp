#include "mao/model.hpp"

#include <set>

#include "mao/text.hpp"

namespace mao {

std::string_view to_string(GatewayKind kind) {
  switch (kind) {
    case GatewayKind::Exclusive: return "Exclusive";
    case GatewayKind::Parallel: return "Parallel";
    case GatewayKind::Inclusive: return "Inclusive";
  }
  return "?";
}

std::string_view gateway_tag(GatewayKind kind) {
  switch (kind) {
    case GatewayKind::Exclusive: return "exclusiveGateway";
    case GatewayKind::Parallel: return "parallelGateway";
    case GatewayKind::Inclusive: return "inclusiveGateway";
  }
  return "?";
}

bool Branch::operator==(const Branch& other) const {
  return condition == other.condition && children == other.children;
}

const std::string& Node::id() const {
  return is_activity() ? activity().id : gateway().id;
}

std::vector<std::string> collect_ids(const ProcessModel& model) {
  std::vector<std::string> ids;
  for_each_node(model, [&](const Node& n, const std::string&) { ids.push_back(n.id()); });
  return ids;
}

std::size_t activity_count(const ProcessModel& model) {
  std::size_t n = 0;
  for_each_node(model, [&](const Node& node, const std::string&) { n += node.is_activity(); });
  return n;
}

std::size_t gateway_count(const ProcessModel& model) {
  std::size_t n = 0;
  for_each_node(model, [&](const Node& node, const std::string&) { n += node.is_gateway(); });
  return n;
}

std::string_view to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::EmptyId: return "empty-id";
    case DefectKind::DuplicateId: return "duplicate-id";
    case DefectKind::EmptyAction: return "empty-action";
    case DefectKind::BranchCount: return "branch-count";
    case DefectKind::MissingCondition: return "missing-condition";
    case DefectKind::EmptyProcess: return "empty-process";
  }
  return "?";
}

std::vector<StructuralDefect> structural_check(const ProcessModel& model) {
  std::vector<StructuralDefect> defects;
  if (model.nodes.empty()) {
    defects.push_back({DefectKind::EmptyProcess, "/nodes", "process has no nodes"});
  }
  std::set<std::string> seen;
  for_each_node(model, [&](const Node& node, const std::string& path) {
    const std::string& id = node.id();
    if (trim(id).empty()) {
      defects.push_back({DefectKind::EmptyId, path, "node has no id"});
    } else if (!seen.insert(id).second) {
      defects.push_back({DefectKind::DuplicateId, path, "id \"" + id + "\" is used more than once"});
    }
    if (node.is_activity()) {
      if (trim(node.activity().action).empty()) {
        defects.push_back({DefectKind::EmptyAction, path, "activity \"" + id + "\" has an empty action"});
      }
      return;
    }
    const Gateway& gw = node.gateway();
    if (gw.branches.size() < 2) {
      defects.push_back({DefectKind::BranchCount, path,
                         "gateway \"" + id + "\" has " + std::to_string(gw.branches.size()) +
                             " branch(es), needs at least 2"});
    }
    if (gw.kind == GatewayKind::Parallel) return;
    for (std::size_t b = 0; b < gw.branches.size(); ++b) {
      const auto& cond = gw.branches[b].condition;
      if (!cond || trim(*cond).empty()) {
        defects.push_back({DefectKind::MissingCondition, path + "/branches/" + std::to_string(b),
                           "branch of " + std::string(gateway_tag(gw.kind)) + " \"" + id +
                               "\" has no condition"});
      }
    }
  });
  return defects;
}

}  // namespace mao
