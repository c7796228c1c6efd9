#include "mao/diff.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "mao/text.hpp"

namespace mao {

double CostModel::substitute(const FlatNode& a, const FlatNode& b) const {
  if (substitution) return substitution(a, b);
  if (a.kind != FlatKind::Activity) return 0.0;
  return (w_del + w_ins) * (1.0 - label_similarity(a.label, b.label));
}

nlohmann::json to_json(const DiffResult& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : r.mapping) pairs.push_back({a, b});
  return {{"distance", r.distance},
          {"algorithm", r.algorithm},
          {"seed", r.seed},
          {"iterations", r.iterations},
          {"breakdown",
           {{"substitution", r.breakdown.substitution},
            {"deletion", r.breakdown.deletion},
            {"insertion", r.breakdown.insertion},
            {"edge", r.breakdown.edge}}},
          {"mapping", pairs}};
}

DiffResult mapping_cost(const FlatGraph& g1, const FlatGraph& g2, const EditMapping& mapping,
                        const CostModel& cost) {
  std::map<std::string, std::string> fwd;
  std::map<std::string, std::string> bwd;
  for (const auto& [a, b] : mapping) {
    const FlatNode* na = g1.find(a);
    const FlatNode* nb = g2.find(b);
    if (na == nullptr) throw InvalidMapping("mapping names unknown node " + a + " of the first graph");
    if (nb == nullptr) throw InvalidMapping("mapping names unknown node " + b + " of the second graph");
    if (!na->same_kind(*nb)) throw InvalidMapping("mapping pairs nodes of different kinds: " + a + ", " + b);
    if (!fwd.emplace(a, b).second) throw InvalidMapping("node " + a + " is mapped twice");
    if (!bwd.emplace(b, a).second) throw InvalidMapping("node " + b + " is mapped twice");
  }

  DiffResult r;
  for (const auto& [a, b] : fwd) {
    r.breakdown.substitution += cost.substitute(*g1.find(a), *g2.find(b));
    r.mapping.emplace_back(a, b);
  }
  r.breakdown.deletion = cost.w_del * static_cast<double>(g1.nodes.size() - fwd.size());
  r.breakdown.insertion = cost.w_ins * static_cast<double>(g2.nodes.size() - bwd.size());

  std::size_t lost = 0;
  for (const auto& [u, v] : g1.edges) {
    auto mu = fwd.find(u);
    auto mv = fwd.find(v);
    if (mu == fwd.end() || mv == fwd.end() || !g2.edges.count({mu->second, mv->second})) ++lost;
  }
  for (const auto& [u, v] : g2.edges) {
    auto mu = bwd.find(u);
    auto mv = bwd.find(v);
    if (mu == bwd.end() || mv == bwd.end() || !g1.edges.count({mu->second, mv->second})) ++lost;
  }
  r.breakdown.edge = cost.w_edge * static_cast<double>(lost);
  r.distance = r.breakdown.substitution + r.breakdown.deletion + r.breakdown.insertion + r.breakdown.edge;
  return r;
}

namespace {

constexpr double kEps = 1e-12;

// Index form of a pair of graphs. Nodes are renumbered in id order so that
// iterating indices in ascending order is the lexicographic tie-break.
struct Problem {
  const FlatGraph& g1;
  const FlatGraph& g2;
  const CostModel& cost;
  int n1 = 0;
  int n2 = 0;
  std::vector<const FlatNode*> v1, v2;
  std::vector<double> sub;         // n1*n2, NaN when the kinds differ
  std::vector<char> adj1, adj2;    // row-major adjacency
  std::vector<std::vector<int>> out1, in1;
  std::vector<std::vector<int>> compat;  // per g1 node, compatible non-anchor g2 nodes
  std::vector<std::pair<int, int>> anchors;
  std::vector<char> anchored1;

  Problem(const FlatGraph& a, const FlatGraph& b, const CostModel& c) : g1(a), g2(b), cost(c) {
    for (const auto& n : g1.nodes) v1.push_back(&n);
    for (const auto& n : g2.nodes) v2.push_back(&n);
    auto by_id = [](const FlatNode* x, const FlatNode* y) { return x->id < y->id; };
    std::sort(v1.begin(), v1.end(), by_id);
    std::sort(v2.begin(), v2.end(), by_id);
    n1 = static_cast<int>(v1.size());
    n2 = static_cast<int>(v2.size());

    std::map<std::string_view, int> idx1, idx2;
    for (int i = 0; i < n1; ++i) idx1[v1[i]->id] = i;
    for (int j = 0; j < n2; ++j) idx2[v2[j]->id] = j;

    adj1.assign(static_cast<std::size_t>(n1 * n1), 0);
    adj2.assign(static_cast<std::size_t>(n2 * n2), 0);
    out1.resize(n1);
    in1.resize(n1);
    for (const auto& [u, v] : g1.edges) {
      const int a1 = idx1.at(u);
      const int b1 = idx1.at(v);
      adj1[a1 * n1 + b1] = 1;
      out1[a1].push_back(b1);
      in1[b1].push_back(a1);
    }
    for (const auto& [u, v] : g2.edges) adj2[idx2.at(u) * n2 + idx2.at(v)] = 1;

    int s1 = -1, e1 = -1, s2 = -1, e2 = -1;
    for (int i = 0; i < n1; ++i) {
      if (v1[i]->kind == FlatKind::Start && s1 < 0) s1 = i;
      if (v1[i]->kind == FlatKind::End && e1 < 0) e1 = i;
    }
    for (int j = 0; j < n2; ++j) {
      if (v2[j]->kind == FlatKind::Start && s2 < 0) s2 = j;
      if (v2[j]->kind == FlatKind::End && e2 < 0) e2 = j;
    }
    anchored1.assign(n1, 0);
    std::vector<char> anchored2(n2, 0);
    if (s1 >= 0 && s2 >= 0) anchors.emplace_back(s1, s2);
    if (e1 >= 0 && e2 >= 0) anchors.emplace_back(e1, e2);
    for (auto [i, j] : anchors) anchored1[i] = anchored2[j] = 1;

    sub.assign(static_cast<std::size_t>(n1 * n2), std::numeric_limits<double>::quiet_NaN());
    compat.resize(n1);
    for (int i = 0; i < n1; ++i) {
      for (int j = 0; j < n2; ++j) {
        if (!v1[i]->same_kind(*v2[j])) continue;
        sub[i * n2 + j] = cost.substitute(*v1[i], *v2[j]);
        if (!anchored1[i] && !anchored2[j]) compat[i].push_back(j);
      }
    }
  }

  [[nodiscard]] bool e1(int a, int b) const { return adj1[a * n1 + b] != 0; }
  [[nodiscard]] bool e2(int a, int b) const { return adj2[a * n2 + b] != 0; }
  [[nodiscard]] double s(int i, int j) const { return sub[i * n2 + j]; }

  [[nodiscard]] EditMapping to_mapping(const std::vector<int>& fwd) const {
    EditMapping m;
    for (int i = 0; i < n1; ++i) {
      if (fwd[i] >= 0) m.emplace_back(v1[i]->id, v2[fwd[i]]->id);
    }
    return m;
  }
};

// Mapping plus its running cost. cost = base + sum over mapped pairs of
// (sub - w_del - w_ins) - 2 w_edge * preserved, which equals mapping_cost.
class State {
 public:
  explicit State(const Problem& p) : p_(&p), fwd_(p.n1, -1), bwd_(p.n2, -1) {
    cost_ = p.cost.w_del * p.n1 + p.cost.w_ins * p.n2 +
            p.cost.w_edge * static_cast<double>(p.g1.edges.size() + p.g2.edges.size());
  }

  static State anchored(const Problem& p) {
    State s(p);
    for (auto [i, j] : p.anchors) s.map(i, j);
    return s;
  }

  // Edges preserved between i (placed on j) and the other mapped nodes.
  [[nodiscard]] int links(int i, int j) const {
    const Problem& p = *p_;
    int n = 0;
    for (int k : p.out1[i]) {
      if (k == i) {
        n += p.e2(j, j);
      } else if (fwd_[k] >= 0) {
        n += p.e2(j, fwd_[k]);
      }
    }
    for (int k : p.in1[i]) {
      if (k != i && fwd_[k] >= 0) n += p.e2(fwd_[k], j);
    }
    return n;
  }

  [[nodiscard]] double gain(int i, int j) const {
    const Problem& p = *p_;
    return p.s(i, j) - p.cost.w_del - p.cost.w_ins - 2.0 * p.cost.w_edge * links(i, j);
  }

  void map(int i, int j) {
    cost_ += gain(i, j);
    fwd_[i] = j;
    bwd_[j] = i;
  }

  void unmap(int i) {
    const int j = fwd_[i];
    fwd_[i] = -1;
    bwd_[j] = -1;
    cost_ -= gain(i, j);
  }

  // Places i on t (-1 = unmapped). A node already on t takes i's old target.
  double move(int i, int t) {
    const double before = cost_;
    const int old = fwd_[i];
    const int other = t >= 0 ? bwd_[t] : -1;
    if (old >= 0) unmap(i);
    if (other >= 0) unmap(other);
    if (t >= 0) map(i, t);
    if (other >= 0 && old >= 0) map(other, old);
    return cost_ - before;
  }

  double try_move(int i, int t) {
    const double before = cost_;
    const int old = fwd_[i];
    const int other = t >= 0 ? bwd_[t] : -1;
    const double delta = move(i, t);
    if (t >= 0) unmap(i);
    if (other >= 0 && old >= 0) unmap(other);
    if (other >= 0) map(other, t);
    if (old >= 0) map(i, old);
    cost_ = before;
    return delta;
  }

  [[nodiscard]] double cost() const { return cost_; }
  // Drops rounding drift after a map/unmap round trip.
  void set_cost(double c) { cost_ = c; }
  [[nodiscard]] const std::vector<int>& fwd() const { return fwd_; }
  [[nodiscard]] const std::vector<int>& bwd() const { return bwd_; }

 private:
  const Problem* p_;
  std::vector<int> fwd_;
  std::vector<int> bwd_;
  double cost_ = 0;
};

DiffResult finish(const Problem& p, const std::vector<int>& fwd, Algorithm algorithm, std::uint64_t seed,
                  std::uint64_t iterations) {
  DiffResult r = mapping_cost(p.g1, p.g2, p.to_mapping(fwd), p.cost);
  r.algorithm = std::string(to_string(algorithm));
  r.seed = seed;
  r.iterations = iterations;
  return r;
}

State greedy(const Problem& p, std::uint64_t* steps = nullptr) {
  State s = State::anchored(p);
  for (;;) {
    double best = -kEps;
    int bi = -1, bj = -1;
    for (int i = 0; i < p.n1; ++i) {
      if (s.fwd()[i] >= 0) continue;
      for (int j : p.compat[i]) {
        if (s.bwd()[j] >= 0) continue;
        const double g = s.gain(i, j);
        if (g < best - kEps || (bi < 0 && g < best)) {
          best = g;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) break;
    s.map(bi, bj);
    if (steps) ++*steps;
  }
  return s;
}

struct Move {
  int i;
  int t;
};

std::vector<Move> neighborhood(const Problem& p, const State& s) {
  std::vector<Move> moves;
  for (int i = 0; i < p.n1; ++i) {
    if (p.anchored1[i]) continue;
    if (s.fwd()[i] >= 0) moves.push_back({i, -1});
    for (int j : p.compat[i]) {
      if (j != s.fwd()[i]) moves.push_back({i, j});
    }
  }
  return moves;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t stream_seed(std::uint64_t seed, Algorithm a) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(a) + 1));
}

DiffResult run_tabu(const Problem& p, const SolverParams& params, std::uint64_t seed) {
  State cur = greedy(p);
  std::vector<int> best = cur.fwd();
  double best_cost = cur.cost();
  const auto cells = static_cast<std::size_t>(p.n1 * p.n2);
  std::vector<int> tabu_add(cells, -1);   // re-adding (i,j) is tabu until this iteration
  std::vector<int> tabu_drop(cells, -1);  // dropping (i,j) is tabu until this iteration

  int it = 0;
  for (; it < params.tabu_iterations && best_cost > kEps; ++it) {
    const auto moves = neighborhood(p, cur);
    int chosen = -1;
    double chosen_cost = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < moves.size(); ++m) {
      const auto [i, t] = moves[m];
      const int old = cur.fwd()[i];
      const int other = t >= 0 ? cur.bwd()[t] : -1;
      bool tabu = false;
      if (old >= 0 && tabu_drop[i * p.n2 + old] > it) tabu = true;
      if (t >= 0 && tabu_add[i * p.n2 + t] > it) tabu = true;
      if (other >= 0 && tabu_drop[other * p.n2 + t] > it) tabu = true;
      if (other >= 0 && old >= 0 && tabu_add[other * p.n2 + old] > it) tabu = true;
      const double c = cur.cost() + cur.try_move(i, t);
      if (tabu && !(c < best_cost - kEps)) continue;
      if (c < chosen_cost - kEps) {
        chosen = static_cast<int>(m);
        chosen_cost = c;
      }
    }
    if (chosen < 0) break;
    const auto [i, t] = moves[static_cast<std::size_t>(chosen)];
    const int old = cur.fwd()[i];
    const int other = t >= 0 ? cur.bwd()[t] : -1;
    cur.move(i, t);
    const int until = it + 1 + params.tabu_tenure;
    if (old >= 0) tabu_add[i * p.n2 + old] = until;
    if (t >= 0) tabu_drop[i * p.n2 + t] = until;
    if (other >= 0) tabu_add[other * p.n2 + t] = until;
    if (other >= 0 && old >= 0) tabu_drop[other * p.n2 + old] = until;
    if (cur.cost() < best_cost - kEps) {
      best_cost = cur.cost();
      best = cur.fwd();
    }
  }
  return finish(p, best, Algorithm::TabuSearch, seed, static_cast<std::uint64_t>(it));
}

DiffResult run_annealing(const Problem& p, const SolverParams& params, std::uint64_t seed) {
  Rng rng(stream_seed(seed, Algorithm::SimulatedAnnealing));
  State cur = greedy(p);
  std::vector<int> best = cur.fwd();
  double best_cost = cur.cost();

  std::vector<int> movable;
  for (int i = 0; i < p.n1; ++i) {
    if (!p.anchored1[i] && !p.compat[i].empty()) movable.push_back(i);
  }
  if (movable.empty()) return finish(p, best, Algorithm::SimulatedAnnealing, seed, 0);

  // Option k of node i: k == 0 unmaps, k >= 1 places i on compat[i][k-1].
  auto random_move = [&]() -> Move {
    for (;;) {
      const int i = movable[rng.below(movable.size())];
      const std::size_t k = rng.below(p.compat[i].size() + 1);
      const int t = k == 0 ? -1 : p.compat[i][k - 1];
      if (t != cur.fwd()[i]) return {i, t};
    }
  };

  double total = 0;
  for (int k = 0; k < params.sa_probe_moves; ++k) {
    const Move m = random_move();
    total += std::abs(cur.try_move(m.i, m.t));
  }
  double temperature = params.sa_probe_moves > 0 ? total / params.sa_probe_moves : 0.0;

  std::uint64_t evaluated = 0;
  int stagnant = 0;
  while (temperature >= params.sa_min_temperature && stagnant < params.sa_stagnant_epochs &&
         best_cost > kEps) {
    bool improved = false;
    for (int k = 0; k < params.sa_epoch_moves; ++k) {
      const Move m = random_move();
      const double delta = cur.try_move(m.i, m.t);
      ++evaluated;
      if (delta <= 0 || rng.uniform() < std::exp(-delta / temperature)) {
        cur.move(m.i, m.t);
        if (cur.cost() < best_cost - kEps) {
          best_cost = cur.cost();
          best = cur.fwd();
          improved = true;
        }
      }
    }
    stagnant = improved ? 0 : stagnant + 1;
    temperature *= params.sa_cooling;
  }
  return finish(p, best, Algorithm::SimulatedAnnealing, seed, evaluated);
}

DiffResult run_ants(const Problem& p, const SolverParams& params, std::uint64_t seed) {
  Rng rng(stream_seed(seed, Algorithm::Ants));
  State incumbent = greedy(p);
  std::vector<int> best = incumbent.fwd();
  double best_cost = incumbent.cost();
  std::vector<double> tau(static_cast<std::size_t>(p.n1 * p.n2), 1.0);

  struct Candidate {
    int i;
    int j;
    double gain;
  };
  std::vector<Candidate> cands;
  std::vector<double> weights;

  int it = 0;
  for (; it < params.ant_iterations && best_cost > kEps; ++it) {
    for (int ant = 0; ant < params.ants; ++ant) {
      State s = State::anchored(p);
      for (;;) {
        cands.clear();
        double lowest = 0;
        for (int i = 0; i < p.n1; ++i) {
          if (s.fwd()[i] >= 0) continue;
          for (int j : p.compat[i]) {
            if (s.bwd()[j] >= 0) continue;
            const double g = s.gain(i, j);
            if (g < -kEps) {
              cands.push_back({i, j, g});
              lowest = std::min(lowest, g);
            }
          }
        }
        if (cands.empty()) break;
        // Desirability is shifted so that the best available pair scores 1.
        weights.clear();
        double sum = 0;
        for (const auto& c : cands) {
          const double eta = 1.0 / (1.0 + (c.gain - lowest));
          const double w = std::pow(tau[c.i * p.n2 + c.j], params.pheromone_weight) *
                           std::pow(eta, params.heuristic_weight);
          weights.push_back(w);
          sum += w;
        }
        double r = rng.uniform() * sum;
        std::size_t pick = cands.size() - 1;
        for (std::size_t k = 0; k < cands.size(); ++k) {
          r -= weights[k];
          if (r < 0) {
            pick = k;
            break;
          }
        }
        s.map(cands[pick].i, cands[pick].j);
      }
      if (s.cost() < best_cost - kEps) {
        best_cost = s.cost();
        best = s.fwd();
      }
    }
    for (double& t : tau) t *= 1.0 - params.evaporation;
    if (best_cost > kEps) {
      for (int i = 0; i < p.n1; ++i) {
        if (best[i] >= 0) tau[i * p.n2 + best[i]] += 1.0 / best_cost;
      }
    }
  }
  return finish(p, best, Algorithm::Ants, seed, static_cast<std::uint64_t>(it));
}

// Depth-first branch and bound over g1 nodes in id order; each node is placed
// on a compatible free g2 node or left unmapped (tried last).
class Exact {
 public:
  explicit Exact(const Problem& p) : p_(p), state_(State::anchored(p)) {
    for (int i = 0; i < p.n1; ++i) {
      if (!p.anchored1[i]) order_.push_back(i);
    }
    decided_.assign(p.n1, 0);
    for (auto [i, j] : p.anchors) decided_[i] = 1;
    class_of1_.resize(p.n1);
    class_of2_.resize(p.n2);
    std::vector<const FlatNode*> reps;
    auto class_of = [&](const FlatNode* n) {
      for (std::size_t k = 0; k < reps.size(); ++k) {
        if (reps[k]->same_kind(*n)) return static_cast<int>(k);
      }
      reps.push_back(n);
      return static_cast<int>(reps.size() - 1);
    };
    for (int i = 0; i < p.n1; ++i) class_of1_[i] = class_of(p.v1[i]);
    for (int j = 0; j < p.n2; ++j) class_of2_[j] = class_of(p.v2[j]);
    classes_ = static_cast<int>(reps.size());

    const State g = greedy(p);
    best_ = g.fwd();
    best_cost_ = g.cost();
  }

  std::vector<int> run() {
    search(0);
    return best_;
  }

  [[nodiscard]] std::uint64_t visited() const { return visited_; }

 private:
  [[nodiscard]] double lower_bound() const {
    const Problem& p = p_;
    const CostModel& c = p.cost;
    const auto& fwd = state_.fwd();
    const auto& bwd = state_.bwd();
    double lb = 0;
    std::vector<int> r1(classes_, 0), r2(classes_, 0);
    for (int i = 0; i < p.n1; ++i) {
      if (!decided_[i]) {
        ++r1[class_of1_[i]];
      } else {
        lb += fwd[i] >= 0 ? p.s(i, fwd[i]) : c.w_del;
      }
    }
    for (int j = 0; j < p.n2; ++j) {
      if (bwd[j] < 0) ++r2[class_of2_[j]];
    }
    for (int k = 0; k < classes_; ++k) {
      lb += std::max(0, r1[k] - r2[k]) * c.w_del + std::max(0, r2[k] - r1[k]) * c.w_ins;
    }
    int lost = 0;
    for (int u = 0; u < p.n1; ++u) {
      for (int v : p.out1[u]) {
        const bool u_deleted = decided_[u] && fwd[u] < 0;
        const bool v_deleted = decided_[v] && fwd[v] < 0;
        if (u_deleted || v_deleted) {
          ++lost;
        } else if (fwd[u] >= 0 && fwd[v] >= 0 && !p.e2(fwd[u], fwd[v])) {
          ++lost;
        }
      }
    }
    for (int x = 0; x < p.n2; ++x) {
      if (bwd[x] < 0) continue;
      for (int y = 0; y < p.n2; ++y) {
        if (bwd[y] >= 0 && p.e2(x, y) && !p.e1(bwd[x], bwd[y])) ++lost;
      }
    }
    return lb + c.w_edge * lost;
  }

  void search(std::size_t depth) {
    ++visited_;
    if (lower_bound() >= best_cost_ - kEps) return;
    if (depth == order_.size()) {
      if (state_.cost() < best_cost_ - kEps) {
        best_cost_ = state_.cost();
        best_ = state_.fwd();
      }
      return;
    }
    const int i = order_[depth];
    decided_[i] = 1;
    for (int j : p_.compat[i]) {
      if (state_.bwd()[j] >= 0) continue;
      const double saved = state_.cost();
      state_.map(i, j);
      search(depth + 1);
      state_.unmap(i);
      state_.set_cost(saved);
    }
    search(depth + 1);
    decided_[i] = 0;
  }


  const Problem& p_;
  State state_;
  std::vector<int> order_;
  std::vector<char> decided_;
  std::vector<int> class_of1_, class_of2_;
  int classes_ = 0;
  std::vector<int> best_;
  double best_cost_ = 0;
  std::uint64_t visited_ = 0;
};

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Greedy: return "Greedy";
    case Algorithm::TabuSearch: return "TabuSearch";
    case Algorithm::Ants: return "Ants";
    case Algorithm::SimulatedAnnealing: return "SimulatedAnnealing";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string wanted = lower(name);
  for (Algorithm a : kAllAlgorithms) {
    if (lower(to_string(a)) == wanted) return a;
  }
  if (wanted == "tabu") return Algorithm::TabuSearch;
  if (wanted == "sa" || wanted == "annealing") return Algorithm::SimulatedAnnealing;
  if (wanted == "aco") return Algorithm::Ants;
  throw std::invalid_argument("unknown algorithm \"" + std::string(name) +
                              "\" (expected Greedy, TabuSearch/tabu, Ants/aco or SimulatedAnnealing/sa)");
}

DiffResult exact_ged(const FlatGraph& g1, const FlatGraph& g2, const CostModel& cost, std::size_t cap) {
  cap = std::min(cap, kExactNodeCap);
  if (g1.nodes.size() > cap || g2.nodes.size() > cap) {
    throw SizeExceeded("exact distance is limited to " + std::to_string(cap) + " nodes per graph (got " +
                       std::to_string(g1.nodes.size()) + " and " + std::to_string(g2.nodes.size()) + ")");
  }
  const Problem p(g1, g2, cost);
  Exact search(p);
  const auto fwd = search.run();
  DiffResult r = mapping_cost(g1, g2, p.to_mapping(fwd), cost);
  r.algorithm = "Exact";
  r.iterations = search.visited();
  return r;
}

DiffResult solve(const FlatGraph& g1, const FlatGraph& g2, const CostModel& cost, Algorithm algorithm,
                 const SolverParams& params, std::uint64_t seed) {
  const Problem p(g1, g2, cost);
  switch (algorithm) {
    case Algorithm::Greedy: {
      std::uint64_t steps = 0;
      const State s = greedy(p, &steps);
      return finish(p, s.fwd(), algorithm, seed, steps);
    }
    case Algorithm::TabuSearch: return run_tabu(p, params, seed);
    case Algorithm::SimulatedAnnealing: return run_annealing(p, params, seed);
    case Algorithm::Ants: return run_ants(p, params, seed);
  }
  throw std::invalid_argument("unknown algorithm");
}

SuiteResult distance_suite(const FlatGraph& g1, const FlatGraph& g2, const CostModel& cost, std::uint64_t seed,
                           const SolverParams& params, bool parallel) {
  SuiteResult out;
  if (parallel) {
    std::vector<std::future<DiffResult>> jobs;
    for (Algorithm a : kAllAlgorithms) {
      jobs.push_back(std::async(std::launch::async, [&, a] { return solve(g1, g2, cost, a, params, seed); }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) out.results[kAllAlgorithms[k]] = jobs[k].get();
  } else {
    for (Algorithm a : kAllAlgorithms) out.results[a] = solve(g1, g2, cost, a, params, seed);
  }
  double sum = 0;
  for (Algorithm a : kAllAlgorithms) sum += out.results[a].distance;
  out.benchmark = sum / static_cast<double>(std::size(kAllAlgorithms));
  return out;
}

}  // namespace mao
