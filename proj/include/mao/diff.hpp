// Graph edit distance between flattened process models: the cost model, an
// exact branch-and-bound solver for small graphs, and four heuristic solvers.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mao/flat_graph.hpp"

namespace mao {

struct CostModel {
  double w_del = 1.0;
  double w_ins = 1.0;
  double w_edge = 0.5;
  /// Optional override for same-kind substitution; must return a value in
  /// [0, w_del + w_ins]. Default: label distance for activities, 0 otherwise.
  std::function<double(const FlatNode&, const FlatNode&)> substitution;

  [[nodiscard]] double substitute(const FlatNode& a, const FlatNode& b) const;
};

/// Injective, kind-preserving partial map from g1 ids to g2 ids.
using EditMapping = std::vector<std::pair<std::string, std::string>>;

struct CostBreakdown {
  double substitution = 0;
  double deletion = 0;
  double insertion = 0;
  double edge = 0;

  bool operator==(const CostBreakdown&) const = default;
};

struct DiffResult {
  double distance = 0;
  EditMapping mapping;  // sorted by g1 id
  CostBreakdown breakdown;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t iterations = 0;
};

nlohmann::json to_json(const DiffResult& result);

class InvalidMapping : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SizeExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

DiffResult mapping_cost(const FlatGraph& g1, const FlatGraph& g2, const EditMapping& mapping,
                        const CostModel& cost = {});

inline constexpr std::size_t kExactNodeCap = 10;

/// Optimal distance. Throws SizeExceeded if either graph has more than
/// `cap` nodes (at most kExactNodeCap).
DiffResult exact_ged(const FlatGraph& g1, const FlatGraph& g2, const CostModel& cost = {},
                     std::size_t cap = kExactNodeCap);

enum class Algorithm { Greedy, TabuSearch, Ants, SimulatedAnnealing };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::Greedy, Algorithm::TabuSearch, Algorithm::Ants,
                                               Algorithm::SimulatedAnnealing};

std::string_view to_string(Algorithm a);
/// Accepts the names printed by to_string, case-insensitively, plus the short
/// forms tabu, sa, annealing and aco. Throws std::invalid_argument otherwise.
Algorithm parse_algorithm(std::string_view name);

struct SolverParams {
  int tabu_tenure = 7;
  int tabu_iterations = 200;

  int sa_probe_moves = 100;
  int sa_epoch_moves = 100;
  double sa_cooling = 0.95;
  double sa_min_temperature = 1e-3;
  int sa_stagnant_epochs = 50;

  int ants = 20;
  int ant_iterations = 100;
  double pheromone_weight = 1.0;  // exponent on pheromone
  double heuristic_weight = 2.0;  // exponent on the desirability term
  double evaporation = 0.1;
};

DiffResult solve(const FlatGraph& g1, const FlatGraph& g2, const CostModel& cost, Algorithm algorithm,
                 const SolverParams& params = {}, std::uint64_t seed = 0);

struct SuiteResult {
  std::map<Algorithm, DiffResult> results;
  double benchmark = 0;  // mean of the four distances
};

/// Runs all four solvers, concurrently when `parallel` is set. The results do
/// not depend on scheduling.
SuiteResult distance_suite(const FlatGraph& g1, const FlatGraph& g2, const CostModel& cost = {},
                           std::uint64_t seed = 0, const SolverParams& params = {}, bool parallel = true);

}  // namespace mao
