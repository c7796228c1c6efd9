// Dataset evaluation: distances of human and generated models to a reference
// model, summary statistics, and how often a candidate beats the humans.
//
// Case directory:
//   requirement.txt
//   reference.bpmn | reference.bpmt
//   humans/*.bpmn|*.bpmt        (optional)
//   candidates/*.bpmn|*.bpmt    (optional)
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "mao/diff.hpp"
#include "mao/flat_graph.hpp"

namespace mao {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalEntity {
  std::string name;  // file stem
  FlatGraph graph;
};

struct EvalCase {
  std::string id;  // directory name
  std::string requirement;
  FlatGraph reference;
  std::vector<EvalEntity> humans;
  std::vector<EvalEntity> candidates;
  std::vector<std::string> warnings;  // import warnings, prefixed with the file name
};

/// .bpmt goes through parse + flatten, .bpmn through import_xml. Errors name the file.
FlatGraph load_graph(const std::filesystem::path& file, std::vector<std::string>* warnings = nullptr);

EvalCase load_case(const std::filesystem::path& dir);

struct DistanceStats {
  double mean = 0;
  double median = 0;
  double min = 0;
  double max = 0;

  bool operator==(const DistanceStats&) const = default;
};

/// Throws std::invalid_argument on an empty list.
DistanceStats stats(std::span<const double> values);

/// Fraction of humans strictly farther from the reference than the candidate.
/// Throws std::invalid_argument on an empty list.
double surpass_proportion(double candidate_distance, std::span<const double> human_distances);

struct EntityScore {
  std::string name;
  std::uint64_t seed = 0;
  std::map<Algorithm, double> per_algorithm;
  double benchmark = 0;
  std::optional<double> surpass;  // candidates only, when there are humans
};

struct EvalReport {
  std::string case_id;
  std::uint64_t seed = 0;
  /// "humans", or "candidates" when the case has no human models.
  std::string population;
  std::map<Algorithm, DistanceStats> per_algorithm_stats;
  std::optional<DistanceStats> benchmark_stats;
  std::vector<EntityScore> humans;
  std::vector<EntityScore> candidates;
};

/// Seed used for the i-th human (candidate = false) or candidate.
std::uint64_t entity_seed(std::uint64_t seed, bool candidate, std::size_t index);

EvalReport evaluate_case(const EvalCase& c, const CostModel& cost = {}, std::uint64_t seed = 0,
                         const SolverParams& params = {}, bool parallel = true);

nlohmann::json to_json(const EvalReport& report);
std::string render_table(const EvalReport& report);

}  // namespace mao
