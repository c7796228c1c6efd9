// Block-structured process model: the in-memory form of BPMN text.
//
// A model is a tree. Top-level nodes run in sequence between an implicit
// start and an implicit end; gateways own ordered branches, and each branch
// owns its own sequence of nodes. Loops are not expressible here; cyclic
// graphs only exist as FlatGraph (see flat_graph.hpp).
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mao {

enum class GatewayKind { Exclusive, Parallel, Inclusive };

std::string_view to_string(GatewayKind kind);
/// Tag name used by the text form, e.g. "exclusiveGateway".
std::string_view gateway_tag(GatewayKind kind);

struct Activity {
  std::string id;
  std::string role;
  std::string action;
  std::optional<std::string> object;

  bool operator==(const Activity&) const = default;
};

struct Node;

struct Branch {
  std::optional<std::string> condition;
  std::vector<Node> children;

  bool operator==(const Branch&) const;
};

struct Gateway {
  std::string id;
  GatewayKind kind = GatewayKind::Exclusive;
  std::vector<Branch> branches;

  bool operator==(const Gateway&) const = default;
};

struct Node {
  std::variant<Activity, Gateway> value;

  Node(Activity a) : value(std::move(a)) {}  // NOLINT(google-explicit-constructor)
  Node(Gateway g) : value(std::move(g)) {}   // NOLINT(google-explicit-constructor)

  [[nodiscard]] bool is_activity() const { return std::holds_alternative<Activity>(value); }
  [[nodiscard]] bool is_gateway() const { return std::holds_alternative<Gateway>(value); }
  [[nodiscard]] const Activity& activity() const { return std::get<Activity>(value); }
  [[nodiscard]] const Gateway& gateway() const { return std::get<Gateway>(value); }
  [[nodiscard]] const std::string& id() const;

  bool operator==(const Node&) const = default;
};

struct ProcessModel {
  std::string name;
  std::vector<Node> nodes;

  bool operator==(const ProcessModel&) const = default;
};

/// Every activity and gateway id in document order (branches carry no id).
std::vector<std::string> collect_ids(const ProcessModel& model);

std::size_t activity_count(const ProcessModel& model);
std::size_t gateway_count(const ProcessModel& model);

enum class DefectKind {
  EmptyId,
  DuplicateId,
  EmptyAction,
  BranchCount,
  MissingCondition,
  EmptyProcess,
};

std::string_view to_string(DefectKind kind);

struct StructuralDefect {
  DefectKind kind;
  std::string path;  // e.g. "/nodes/1/branches/0/children/2"
  std::string detail;

  bool operator==(const StructuralDefect&) const = default;
};

/// Empty iff every model invariant holds. Defects come back in document order.
std::vector<StructuralDefect> structural_check(const ProcessModel& model);

/// Visits every node depth-first in document order with its tree path.
template <typename Fn>
void for_each_node(const std::vector<Node>& nodes, const std::string& prefix, Fn&& fn) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = prefix + "/" + std::to_string(i);
    fn(nodes[i], path);
    if (nodes[i].is_gateway()) {
      const auto& gw = nodes[i].gateway();
      for (std::size_t b = 0; b < gw.branches.size(); ++b) {
        for_each_node(gw.branches[b].children,
                      path + "/branches/" + std::to_string(b) + "/children", fn);
      }
    }
  }
}

template <typename Fn>
void for_each_node(const ProcessModel& model, Fn&& fn) {
  for_each_node(model.nodes, "/nodes", std::forward<Fn>(fn));
}

}  // namespace mao
