#include "mao/flat_graph.hpp"

#include <algorithm>

#include "mao/text.hpp"

namespace mao {

std::string_view to_string(FlatKind kind) {
  switch (kind) {
    case FlatKind::Start: return "start";
    case FlatKind::End: return "end";
    case FlatKind::Activity: return "activity";
    case FlatKind::Split: return "split";
    case FlatKind::Join: return "join";
  }
  return "?";
}

const FlatNode* FlatGraph::find(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const FlatNode& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const FlatNode* FlatGraph::start() const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [](const FlatNode& n) { return n.kind == FlatKind::Start; });
  return it == nodes.end() ? nullptr : &*it;
}

const FlatNode* FlatGraph::end() const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [](const FlatNode& n) { return n.kind == FlatKind::End; });
  return it == nodes.end() ? nullptr : &*it;
}

std::vector<std::string> FlatGraph::check() const {
  std::vector<std::string> problems;
  std::set<std::string> ids;
  std::size_t starts = 0;
  std::size_t ends = 0;
  for (const FlatNode& n : nodes) {
    if (!ids.insert(n.id).second) problems.push_back("duplicate node id " + n.id);
    starts += n.kind == FlatKind::Start;
    ends += n.kind == FlatKind::End;
  }
  if (starts != 1) problems.push_back(std::to_string(starts) + " start nodes");
  if (ends != 1) problems.push_back(std::to_string(ends) + " end nodes");
  for (const auto& [from, to] : edges) {
    const FlatNode* a = find(from);
    const FlatNode* b = find(to);
    if (a == nullptr || b == nullptr) {
      problems.push_back("edge " + from + " -> " + to + " has a missing endpoint");
      continue;
    }
    if (b->kind == FlatKind::Start) problems.push_back("edge into start node " + to);
    if (a->kind == FlatKind::End) problems.push_back("edge out of end node " + from);
  }
  return problems;
}

namespace {

class Flattener {
 public:
  explicit Flattener(const ProcessModel& model) {
    const auto ids = collect_ids(model);
    used_.insert(ids.begin(), ids.end());
  }

  FlatGraph run(const ProcessModel& model) {
    g_.name = model.name;
    const std::string start = unique(std::string(kStartId));
    const std::string end = unique(std::string(kEndId));
    g_.nodes.push_back({start, FlatKind::Start, {}, {}, {}, {}, {}});
    const std::string last = chain(model.nodes, start, std::nullopt);
    g_.nodes.push_back({end, FlatKind::End, {}, {}, {}, {}, {}});
    g_.edges.insert({last, end});
    return std::move(g_);
  }

 private:
  std::string unique(std::string base) {
    std::string id = base;
    for (int k = 2; used_.count(id); ++k) id = base + "_" + std::to_string(k);
    used_.insert(id);
    return id;
  }

  void edge(const std::string& from, const std::string& to, const std::optional<std::string>& condition) {
    g_.edges.insert({from, to});
    if (!condition) return;
    auto [it, fresh] = g_.conditions.emplace(FlatEdge{from, to}, *condition);
    if (!fresh) it->second += " or " + *condition;  // two empty branches share the split->join edge
  }

  // Links `nodes` after `prev` and returns the id of the last element. The
  // first edge carries `condition`.
  std::string chain(const std::vector<Node>& nodes, std::string prev, std::optional<std::string> condition) {
    for (const Node& node : nodes) {
      if (node.is_activity()) {
        const Activity& a = node.activity();
        g_.nodes.push_back({a.id, FlatKind::Activity, {}, normalize_label(a.action), a.action, a.role, a.object});
        edge(prev, a.id, condition);
        prev = a.id;
      } else {
        const Gateway& gw = node.gateway();
        const std::string split = unique(gw.id + "_split");
        g_.nodes.push_back({split, FlatKind::Split, gw.kind, {}, gw.id, {}, {}});
        edge(prev, split, condition);
        std::vector<std::string> exits;
        for (const Branch& b : gw.branches) exits.push_back(chain(b.children, split, b.condition));
        const std::string join = unique(gw.id + "_join");
        g_.nodes.push_back({join, FlatKind::Join, gw.kind, {}, gw.id, {}, {}});
        for (std::size_t i = 0; i < exits.size(); ++i) {
          if (exits[i] == split) {
            edge(split, join, gw.branches[i].condition);
          } else {
            edge(exits[i], join, std::nullopt);
          }
        }
        prev = join;
      }
      condition.reset();
    }
    return prev;
  }

  FlatGraph g_;
  std::set<std::string> used_;
};

}  // namespace

FlatGraph flatten(const ProcessModel& model) { return Flattener(model).run(model); }

}  // namespace mao
