#include <map>
#include <set>

#include "mao/interop.hpp"

namespace mao {

namespace {

class Rebuilder {
 public:
  explicit Rebuilder(const FlatGraph& g) : g_(g) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) index_[g.nodes[i].id] = i;
    for (const auto& [a, b] : g.edges) {
      succ_[a].push_back(b);
      ++in_[b];
    }
    // Successors in document order so branches keep their order.
    for (auto& [id, list] : succ_) {
      std::sort(list.begin(), list.end(), [&](const auto& x, const auto& y) { return index_[x] < index_[y]; });
    }
  }

  ProcessModel run() {
    if (const auto problems = g_.check(); !problems.empty()) fail(problems.front());
    ProcessModel m;
    m.name = g_.name;
    const FlatNode* start = g_.start();
    std::string cur = only_successor(start->id);
    m.nodes = sequence(cur);
    if (node(cur).kind != FlatKind::End) fail("join " + cur + " has no matching split");
    if (visited_.size() + 2 != g_.nodes.size()) fail("some nodes are not reachable on a nested path");
    return m;
  }

 private:
  [[noreturn]] static void fail(const std::string& why) { throw NonBlockStructured("graph is not block-structured: " + why); }

  const FlatNode& node(const std::string& id) { return g_.nodes[index_.at(id)]; }

  std::string only_successor(const std::string& id) {
    const auto& s = succ_[id];
    if (s.size() != 1) fail(id + " has " + std::to_string(s.size()) + " outgoing flows");
    return s.front();
  }

  void visit(const std::string& id) {
    if (!visited_.insert(id).second) fail("cycle through " + id);
  }

  // Consumes nodes from `cur` until a join or the end event; `cur` is left there.
  std::vector<Node> sequence(std::string& cur) {
    std::vector<Node> nodes;
    for (;;) {
      const FlatNode& n = node(cur);
      if (n.kind == FlatKind::End || n.kind == FlatKind::Join) return nodes;
      if (n.kind == FlatKind::Start) fail("flow back into the start event");
      visit(cur);
      if (in_[cur] != 1) fail(cur + " has " + std::to_string(in_[cur]) + " incoming flows");
      if (n.kind == FlatKind::Activity) {
        nodes.push_back(Activity{n.id, n.role, n.name, n.object});
        cur = only_successor(cur);
        continue;
      }
      nodes.push_back(gateway(n, cur));
    }
  }

  Gateway gateway(const FlatNode& split, std::string& cur) {
    Gateway gw;
    gw.kind = split.gateway;
    // Exported splits are named after their gateway and carry an "_split" id.
    const bool ours = !split.name.empty() && split.id.rfind(split.name + "_split", 0) == 0;
    gw.id = ours ? split.name : split.id;
    const auto& outs = succ_[split.id];
    if (outs.size() < 2) fail("split " + split.id + " has fewer than two outgoing flows");
    std::optional<std::string> join;
    for (const std::string& first : outs) {
      Branch b;
      if (auto c = g_.conditions.find({split.id, first}); c != g_.conditions.end()) b.condition = c->second;
      std::string at = first;
      b.children = sequence(at);
      if (node(at).kind != FlatKind::Join) fail("branch of " + split.id + " reaches the end event");
      if (join && *join != at) fail("branches of " + split.id + " close at different joins");
      join = at;
      gw.branches.push_back(std::move(b));
    }
    const FlatNode& j = node(*join);
    if (j.gateway != split.gateway) fail("split " + split.id + " is closed by a join of another kind");
    // Each branch contributes one incoming flow, except that several empty
    // branches share one split->join flow.
    std::size_t direct = 0;
    for (const auto& b : gw.branches) direct += b.children.empty();
    const std::size_t expected = gw.branches.size() - direct + (direct > 0 ? 1 : 0);
    if (in_[*join] != static_cast<int>(expected)) fail("join " + *join + " merges flows from outside its split");
    visit(*join);
    cur = only_successor(*join);
    return gw;
  }

  const FlatGraph& g_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::vector<std::string>> succ_;
  std::map<std::string, int> in_;
  std::set<std::string> visited_;
};

}  // namespace

ProcessModel to_process_model(const FlatGraph& graph) { return Rebuilder(graph).run(); }

}  // namespace mao
