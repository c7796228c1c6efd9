// Flattened control-flow graph of a process model: explicit start/end events
// and split/join pairs for gateways. This is the form distances are computed on.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mao/model.hpp"

namespace mao {

enum class FlatKind { Start, End, Activity, Split, Join };

std::string_view to_string(FlatKind kind);

struct FlatNode {
  std::string id;
  FlatKind kind = FlatKind::Activity;
  GatewayKind gateway = GatewayKind::Exclusive;  // Split and Join only
  std::string label;                             // normalized action, used for matching
  std::string name;                              // action as written
  std::string role;
  std::optional<std::string> object;

  /// Substitution is only allowed between nodes of the same kind; for splits
  /// and joins the gateway kind is part of the kind.
  [[nodiscard]] bool same_kind(const FlatNode& other) const {
    return kind == other.kind &&
           ((kind != FlatKind::Split && kind != FlatKind::Join) || gateway == other.gateway);
  }

  bool operator==(const FlatNode&) const = default;
};

using FlatEdge = std::pair<std::string, std::string>;

struct FlatGraph {
  std::string name;
  std::vector<FlatNode> nodes;
  std::set<FlatEdge> edges;
  /// Branch conditions, keyed by the edge leaving the split.
  std::map<FlatEdge, std::string> conditions;

  [[nodiscard]] const FlatNode* find(std::string_view id) const;
  [[nodiscard]] const FlatNode* start() const;
  [[nodiscard]] const FlatNode* end() const;

  /// Invariant violations (one Start, one End, edge endpoints exist, Start has
  /// no incoming and End no outgoing edge). Empty when the graph is well formed.
  [[nodiscard]] std::vector<std::string> check() const;
};

inline constexpr std::string_view kStartId = "StartEvent";
inline constexpr std::string_view kEndId = "EndEvent";

/// Expects a model that passes structural_check. Node order: Start, then
/// document order (split, branch contents, join), then End.
FlatGraph flatten(const ProcessModel& model);

}  // namespace mao
