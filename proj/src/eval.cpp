#include "mao/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

#include "mao/dsl.hpp"
#include "mao/interop.hpp"

namespace mao {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw EvalError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool is_model_file(const fs::path& p) { return p.extension() == ".bpmn" || p.extension() == ".bpmt"; }

std::vector<EvalEntity> load_dir(const fs::path& dir, std::vector<std::string>& warnings) {
  std::vector<EvalEntity> out;
  if (!fs::is_directory(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && is_model_file(e.path())) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back({f.stem().string(), load_graph(f, &warnings)});
  return out;
}

}  // namespace

FlatGraph load_graph(const fs::path& file, std::vector<std::string>* warnings) {
  const std::string text = read_text(file);
  const std::string name = file.filename().string();
  if (file.extension() == ".bpmt") {
    ParseOutcome parsed = parse(text);
    if (!parsed.ok()) {
      throw EvalError(name + ": " + (parsed.errors.empty() ? "unparseable" : format_error(parsed.errors.front())));
    }
    if (auto defects = structural_check(*parsed.model); !defects.empty()) {
      throw EvalError(name + ": " + defects.front().path + ": " + defects.front().detail);
    }
    return flatten(*parsed.model);
  }
  if (file.extension() == ".bpmn") {
    try {
      ImportResult r = import_xml(text);
      if (warnings) {
        for (auto& w : r.warnings) warnings->push_back(name + ": " + w);
      }
      return std::move(r.graph);
    } catch (const ImportError& e) {
      throw EvalError(name + ": " + e.what());
    }
  }
  throw EvalError(name + ": unsupported extension (want .bpmt or .bpmn)");
}

EvalCase load_case(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw EvalError("not a case directory: " + dir.string());
  EvalCase c;
  c.id = fs::absolute(dir).lexically_normal().filename().string();
  if (c.id.empty()) c.id = fs::absolute(dir).lexically_normal().parent_path().filename().string();

  const fs::path req = dir / "requirement.txt";
  if (!fs::exists(req)) throw EvalError("missing " + req.string());
  c.requirement = read_text(req);

  std::optional<fs::path> ref;
  for (const char* name : {"reference.bpmn", "reference.bpmt"}) {
    if (fs::exists(dir / name)) {
      if (ref) throw EvalError("both reference.bpmn and reference.bpmt in " + dir.string());
      ref = dir / name;
    }
  }
  if (!ref) throw EvalError("missing reference.bpmn or reference.bpmt in " + dir.string());
  c.reference = load_graph(*ref, &c.warnings);
  c.humans = load_dir(dir / "humans", c.warnings);
  c.candidates = load_dir(dir / "candidates", c.warnings);
  return c;
}

DistanceStats stats(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("stats: empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  DistanceStats s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
  s.min = v.front();
  s.max = v.back();
  // Summation error must not push the mean outside the range.
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

double surpass_proportion(double candidate_distance, std::span<const double> human_distances) {
  if (human_distances.empty()) throw std::invalid_argument("surpass_proportion: no human distances");
  const auto beaten = std::count_if(human_distances.begin(), human_distances.end(),
                                    [&](double h) { return h > candidate_distance; });
  return static_cast<double>(beaten) / static_cast<double>(human_distances.size());
}

std::uint64_t entity_seed(std::uint64_t seed, bool candidate, std::size_t index) {
  return seed ^ (0xD1B54A32D192ED03ULL * (2 * static_cast<std::uint64_t>(index) + (candidate ? 2 : 1)));
}

EvalReport evaluate_case(const EvalCase& c, const CostModel& cost, std::uint64_t seed, const SolverParams& params,
                         bool parallel) {
  EvalReport report;
  report.case_id = c.id;
  report.seed = seed;

  auto score = [&](const EvalEntity& e, std::uint64_t s) {
    try {
      const SuiteResult suite = distance_suite(e.graph, c.reference, cost, s, params, false);
      EntityScore out{e.name, s, {}, suite.benchmark, std::nullopt};
      for (const auto& [alg, r] : suite.results) out.per_algorithm[alg] = r.distance;
      return out;
    } catch (const std::exception& ex) {
      throw EvalError(e.name + ": " + ex.what());
    }
  };

  std::vector<std::future<EntityScore>> humans, candidates;
  const auto policy = parallel ? std::launch::async : std::launch::deferred;
  for (std::size_t i = 0; i < c.humans.size(); ++i) {
    humans.push_back(std::async(policy, score, std::cref(c.humans[i]), entity_seed(seed, false, i)));
  }
  for (std::size_t i = 0; i < c.candidates.size(); ++i) {
    candidates.push_back(std::async(policy, score, std::cref(c.candidates[i]), entity_seed(seed, true, i)));
  }
  for (auto& f : humans) report.humans.push_back(f.get());
  for (auto& f : candidates) report.candidates.push_back(f.get());

  const auto& population = report.humans.empty() ? report.candidates : report.humans;
  report.population = report.humans.empty() ? "candidates" : "humans";
  if (!population.empty()) {
    for (Algorithm alg : kAllAlgorithms) {
      std::vector<double> v;
      for (const auto& e : population) v.push_back(e.per_algorithm.at(alg));
      report.per_algorithm_stats[alg] = stats(v);
    }
    std::vector<double> b;
    for (const auto& e : population) b.push_back(e.benchmark);
    report.benchmark_stats = stats(b);
  }
  if (!report.humans.empty()) {
    std::vector<double> hb;
    for (const auto& h : report.humans) hb.push_back(h.benchmark);
    for (auto& cand : report.candidates) cand.surpass = surpass_proportion(cand.benchmark, hb);
  }
  return report;
}

namespace {

nlohmann::ordered_json stats_json(const DistanceStats& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["median"] = s.median;
  j["min"] = s.min;
  j["max"] = s.max;
  return j;
}

nlohmann::ordered_json entity_json(const EntityScore& e) {
  nlohmann::ordered_json j;
  j["name"] = e.name;
  j["seed"] = e.seed;
  j["benchmark"] = e.benchmark;
  nlohmann::ordered_json per;
  for (const auto& [alg, d] : e.per_algorithm) per[std::string(to_string(alg))] = d;
  j["per_algorithm"] = per;
  if (e.surpass) j["surpass"] = *e.surpass;
  return j;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["case"] = r.case_id;
  j["seed"] = r.seed;
  j["population"] = r.population;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [alg, s] : r.per_algorithm_stats) per[std::string(to_string(alg))] = stats_json(s);
  if (r.benchmark_stats) per["Benchmark"] = stats_json(*r.benchmark_stats);
  j["per_algorithm_stats"] = per;
  j["humans"] = nlohmann::ordered_json::array();
  for (const auto& h : r.humans) j["humans"].push_back(entity_json(h));
  j["candidates"] = nlohmann::ordered_json::array();
  for (const auto& c : r.candidates) j["candidates"].push_back(entity_json(c));
  return j;
}

std::string render_table(const EvalReport& r) {
  std::ostringstream os;
  os << "case " << r.case_id << ", seed " << r.seed << "\n";
  if (!r.benchmark_stats) {
    os << "no models to score\n";
    return os.str();
  }
  const std::size_t n = r.population == "humans" ? r.humans.size() : r.candidates.size();
  os << "\ndistance to the reference over " << r.population << " (n=" << n << ")\n";
  os << pad("algorithm", 20, true) << pad("mean", 10) << pad("median", 10) << pad("min", 10) << pad("max", 10)
     << "\n";
  auto row = [&](std::string name, const DistanceStats& s) {
    os << pad(std::move(name), 20, true) << pad(fixed(s.mean), 10) << pad(fixed(s.median), 10)
       << pad(fixed(s.min), 10) << pad(fixed(s.max), 10) << "\n";
  };
  for (const auto& [alg, s] : r.per_algorithm_stats) row(std::string(to_string(alg)), s);
  row("Benchmark", *r.benchmark_stats);

  if (!r.candidates.empty()) {
    os << "\n" << pad("candidate", 20, true) << pad("benchmark", 12);
    if (!r.humans.empty()) os << pad("surpass", 10);
    os << "\n";
    for (const auto& c : r.candidates) {
      os << pad(c.name, 20, true) << pad(fixed(c.benchmark), 12);
      if (c.surpass) os << pad(fixed(*c.surpass * 100.0, 1) + "%", 10);
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace mao
