#include "cli.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "mao/diff.hpp"
#include "mao/dsl.hpp"
#include "mao/eval.hpp"
#include "mao/interop.hpp"
#include "mao/pipeline.hpp"
#include "mao/text.hpp"
#include "mao/validator.hpp"

namespace mao::cli {

namespace fs = std::filesystem;

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

namespace {

// Thrown for anything the user can fix with flags, files or environment.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Content that cannot be processed (unparseable model, irreducible graph, ...).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::pair<std::string, std::string>> kDefaults = {
    {"backend", "http"},
    {"replay", ""},
    {"api_base", "https://api.openai.com/v1"},
    {"api_key", ""},
    {"model", "gpt-4"},
    {"out", "out"},
    {"refinement", "true"},
    {"reviewing", "true"},
    {"testing", "true"},
    {"refinement_fallback", "false"},
    {"max_review_rounds", "3"},
    {"max_test_rounds", "3"},
    {"max_parse_retries", "2"},
    {"temperature", "0"},
    {"seed", "0"},
    {"w_del", "1"},
    {"w_ins", "1"},
    {"w_edge", "0.5"},
};

const std::map<std::string, std::string> kEnvKeys = {
    {"MAO_API_BASE", "api_base"}, {"MAO_API_KEY", "api_key"}, {"MAO_MODEL", "model"}};

class Settings {
 public:
  Settings() {
    for (const auto& [k, v] : kDefaults) set(k, v, "default");
  }

  void load_file(const fs::path& path) {
    if (!fs::exists(path)) throw UsageError("config file not found: " + path.string());
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
      throw UsageError("config file " + path.string() + ": " + e.what());
    }
    for (const auto& [key, node] : tree) {
      if (!node.empty()) throw UsageError("config file " + path.string() + ": sections are not supported (" + key + ")");
      if (!values_.count(key)) throw UsageError("config file " + path.string() + ": unknown key '" + key + "'");
      set(key, std::string(trim(node.data())), "file");
    }
  }

  void load_env(const EnvLookup& env) {
    for (const auto& [name, key] : kEnvKeys) {
      if (auto v = env(name)) set(key, *v, "env " + name);
    }
  }

  void set(const std::string& key, std::string value, std::string source) {
    values_[key] = std::move(value);
    sources_[key] = std::move(source);
  }

  [[nodiscard]] const std::string& str(const std::string& key) const { return values_.at(key); }

  [[nodiscard]] bool boolean(const std::string& key) const {
    const std::string v = normalize_label(str(key));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw UsageError(key + ": expected a boolean, got '" + str(key) + "'");
  }

  [[nodiscard]] double number(const std::string& key) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(str(key), &used);
      if (used == str(key).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(key + ": expected a number, got '" + str(key) + "'");
  }

  [[nodiscard]] int integer(const std::string& key) const {
    const double v = number(key);
    if (v != static_cast<int>(v)) throw UsageError(key + ": expected an integer, got '" + str(key) + "'");
    return static_cast<int>(v);
  }

  [[nodiscard]] std::uint64_t seed() const {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(str("seed"), &used, 0);
      if (used == str("seed").size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("seed: expected an unsigned integer, got '" + str("seed") + "'");
  }

  [[nodiscard]] CostModel cost() const {
    CostModel c;
    c.w_del = number("w_del");
    c.w_ins = number("w_ins");
    c.w_edge = number("w_edge");
    if (c.w_del < 0 || c.w_ins < 0 || c.w_edge < 0) throw UsageError("cost weights must be non-negative");
    return c;
  }

  void echo(std::ostream& os) const {
    os << "resolved configuration:\n";
    for (const auto& [k, v] : values_) {
      const std::string shown = k == "api_key" && !v.empty() ? "****" : v;
      os << "  " << k << " = " << shown << "  (" << sources_.at(k) << ")\n";
    }
  }

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : values_) {
      if (k != "api_key") j[k] = v;
    }
    return j;
  }

 private:
  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> sources_;
};

// Flag values land here first so that they can be applied after file and env.
struct FlagSet {
  std::map<std::string, std::string> strings;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::vector<std::pair<std::string, std::pair<CLI::Option*, std::string>>> switches;

  void option(CLI::App* app, const std::string& names, const std::string& key, const std::string& help) {
    options.emplace_back(key, app->add_option(names, strings[key], help));
  }
  void flag(CLI::App* app, const std::string& names, const std::string& key, const std::string& value,
            const std::string& help) {
    switches.push_back({key, {app->add_flag(names, help), value}});
  }
  void apply(Settings& s) const {
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) s.set(key, strings.at(key), "flag");
    }
    for (const auto& [key, sw] : switches) {
      if (sw.first->count() > 0) s.set(key, sw.second, "flag");
    }
  }
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in || fs::is_directory(p)) throw UsageError("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw UsageError("cannot write " + p.string());
  out << text;
}

FlatGraph load_graph_checked(const std::string& file) {
  if (!fs::is_regular_file(file)) throw UsageError("cannot read " + file);
  try {
    return load_graph(file);
  } catch (const EvalError& e) {
    throw InputError(e.what());
  }
}

ProcessModel load_model_text(const std::string& file, const std::string& text) {
  ParseOutcome parsed = parse(text);
  if (!parsed.ok()) {
    throw InputError(file + ": " + (parsed.errors.empty() ? "unparseable" : format_error(parsed.errors.front())));
  }
  if (auto defects = structural_check(*parsed.model); !defects.empty()) {
    throw InputError(file + ": " + defects.front().path + ": " + defects.front().detail);
  }
  return std::move(*parsed.model);
}

// --- commands -----------------------------------------------------------------

struct GenerateArgs {
  std::string requirement_file;
  std::string requirement_text;
};

int cmd_generate(const GenerateArgs& a, const Settings& s, std::ostream& out, std::ostream& err) {
  if (a.requirement_file.empty() == a.requirement_text.empty()) {
    throw UsageError("give exactly one of --requirement FILE or --text STRING");
  }
  const std::string requirement = a.requirement_file.empty() ? a.requirement_text : read_text(a.requirement_file);
  if (trim(requirement).empty()) throw UsageError("the requirement is empty");

  PipelineConfig cfg;
  cfg.refinement = s.boolean("refinement");
  cfg.reviewing = s.boolean("reviewing");
  cfg.testing = s.boolean("testing");
  cfg.refinement_fallback = s.boolean("refinement_fallback");
  cfg.max_review_rounds = s.integer("max_review_rounds");
  cfg.max_test_rounds = s.integer("max_test_rounds");
  cfg.max_parse_retries = s.integer("max_parse_retries");
  cfg.expert_temperature = cfg.reviewer_temperature = s.number("temperature");

  const std::string& backend = s.str("backend");
  if (backend == "replay") {
    if (s.str("replay").empty()) throw UsageError("the replay backend needs --replay FILE");
    try {
      cfg.backend = std::make_shared<ReplayBackend>(ReplayBackend::from_file(s.str("replay")));
    } catch (const ReplayError& e) {
      throw UsageError(e.what());
    }
  } else if (backend == "http") {
    if (s.str("api_key").empty()) {
      throw UsageError("MAO_API_KEY is not set (the http backend needs an API key; set MAO_API_KEY, api_key in "
                       "the config file, or use --backend replay)");
    }
    try {
      cfg.backend = std::make_shared<HttpBackend>(HttpOptions{s.str("api_base"), s.str("api_key"), s.str("model")});
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("MAO_API_BASE: ") + e.what());
    }
  } else {
    throw UsageError("unknown backend '" + backend + "' (want http or replay)");
  }
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const fs::path dir = s.str("out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw UsageError("cannot create output directory " + dir.string());

  PipelineResult result;
  try {
    result = run_pipeline(requirement, cfg);
  } catch (const PipelineError& e) {
    write_text(dir / "transcript.jsonl", e.transcript().to_jsonl());
    err << "error: " << e.what() << "\n(partial transcript in " << (dir / "transcript.jsonl").string() << ")\n";
    return kPipelineFailure;
  }

  write_text(dir / "model.bpmt", result.final_text);
  write_text(dir / "transcript.jsonl", result.transcript.to_jsonl());
  const bool exportable = result.final_model && structural_check(*result.final_model).empty();
  if (exportable) {
    write_text(dir / "model.bpmn", export_xml(*result.final_model));
  } else {
    std::error_code ignore;
    fs::remove(dir / "model.bpmn", ignore);
    err << "warning: final model has structural defects, model.bpmn not written\n";
  }
  nlohmann::ordered_json report = to_json(result);
  report["requirement_sha256"] = sha256_hex(requirement);
  report["config"] = s.to_json();
  write_text(dir / "report.json", report.dump(2) + "\n");
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";

  const bool clean = result.clean ? *result.clean : validate(result.final_text, cfg.registry).clean;
  out << (clean ? "clean" : "not clean") << ": " << (dir / "model.bpmt").string() << "\n";
  return clean ? kOk : kFindings;
}

struct ValidateArgs {
  std::string file;
  bool json = false;
  bool lenient = false;
  std::string rules;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const std::string text = read_text(a.file);
  RuleRegistry registry = RuleRegistry::defaults();
  if (!a.rules.empty()) {
    try {
      registry.load_json(read_text(a.rules));
    } catch (const std::invalid_argument& e) {
      throw UsageError(a.rules + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(a.rules + ": " + e.what());
    }
  }
  const ValidationReport report = validate(text, registry, {a.lenient});
  out << render_report(report, a.json ? ReportFormat::Machine : ReportFormat::Human);
  if (a.json) out << "\n";
  return report.clean ? kOk : kFindings;
}

struct DiffArgs {
  std::string a, b;
  std::string algo;
  bool exact = false;
  bool serial = false;
};

int cmd_diff(const DiffArgs& d, const Settings& s, std::ostream& out) {
  const FlatGraph g1 = load_graph_checked(d.a);
  const FlatGraph g2 = load_graph_checked(d.b);
  const CostModel cost = s.cost();
  const std::uint64_t seed = s.seed();
  if (d.exact && !d.algo.empty()) throw UsageError("--exact and --algo are exclusive");

  if (d.exact) {
    try {
      out << to_json(exact_ged(g1, g2, cost)).dump(2) << "\n";
    } catch (const SizeExceeded& e) {
      throw InputError(std::string("SizeExceeded: ") + e.what());
    }
    return kOk;
  }
  if (!d.algo.empty()) {
    Algorithm alg;
    try {
      alg = parse_algorithm(d.algo);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    out << to_json(solve(g1, g2, cost, alg, {}, seed)).dump(2) << "\n";
    return kOk;
  }
  const SuiteResult suite = distance_suite(g1, g2, cost, seed, {}, !d.serial);
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["benchmark"] = suite.benchmark;
  nlohmann::ordered_json results;
  for (const auto& [alg, r] : suite.results) results[std::string(to_string(alg))] = to_json(r);
  j["results"] = results;
  out << j.dump(2) << "\n";
  return kOk;
}

struct ConvertArgs {
  std::string file;
  std::string to;
  std::string output;
};

int cmd_convert(const ConvertArgs& c, std::ostream& out) {
  const fs::path src = c.file;
  const std::string ext = src.extension().string();
  if (ext != ".bpmt" && ext != ".bpmn") throw UsageError(c.file + ": unsupported extension (want .bpmt or .bpmn)");
  const std::string text = read_text(src);

  std::string result;
  if (ext == ".bpmt") {
    const ProcessModel m = load_model_text(c.file, text);
    result = c.to == "bpmn" ? export_xml(m) : serialize(m);
  } else {
    ImportResult imported;
    try {
      imported = import_xml(text);
    } catch (const ImportError& e) {
      throw InputError(c.file + ": " + e.what());
    }
    if (c.to == "bpmn") {
      result = export_xml(imported.graph);
    } else {
      try {
        result = serialize(to_process_model(imported.graph));
      } catch (const NonBlockStructured& e) {
        throw InputError(c.file + ": NonBlockStructured: " + e.what() +
                         "; the file can still be used as a graph (mao diff, mao eval)");
      }
    }
  }
  if (c.output.empty()) {
    out << result;
  } else {
    write_text(c.output, result);
  }
  return kOk;
}

struct EvalArgs {
  std::string dir;
  std::string output;
  bool json = false;
  bool serial = false;
};

int cmd_eval(const EvalArgs& e, const Settings& s, std::ostream& out, std::ostream& err) {
  EvalCase c;
  try {
    c = load_case(e.dir);
  } catch (const EvalError& ex) {
    throw UsageError(ex.what());
  }
  for (const auto& w : c.warnings) err << "warning: " << w << "\n";
  EvalReport report;
  try {
    report = evaluate_case(c, s.cost(), s.seed(), {}, !e.serial);
  } catch (const EvalError& ex) {
    throw InputError(ex.what());
  }
  const std::string json = to_json(report).dump(2) + "\n";
  const std::string table = render_table(report);
  if (!e.output.empty()) {
    std::error_code ec;
    fs::create_directories(e.output, ec);
    if (ec || !fs::is_directory(e.output)) throw UsageError("cannot create output directory " + e.output);
    write_text(fs::path(e.output) / "report.json", json);
    write_text(fs::path(e.output) / "report.txt", table);
  }
  out << (e.json ? json : table);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Multi-agent process modeling: generate, validate, diff, convert and evaluate BPMN models", "mao"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mao 0.1.0");

  std::string config_file;
  bool verbose = false;
  app.add_option("--config", config_file, "key = value settings file");
  app.add_flag("-v,--verbose", verbose, "print the resolved configuration to stderr");

  FlagSet flags;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "run the four-phase pipeline on a requirement");
  g->add_option("-r,--requirement", gen.requirement_file, "requirement text file");
  g->add_option("--text", gen.requirement_text, "requirement given inline");
  flags.option(g, "-o,--out", "out", "output directory (default: out)");
  flags.option(g, "--backend", "backend", "http or replay");
  flags.option(g, "--replay", "replay", "replay script (JSON Lines)");
  flags.option(g, "--api-base", "api_base", "chat-completions base URL (env MAO_API_BASE)");
  flags.option(g, "--model", "model", "model name (env MAO_MODEL)");
  flags.option(g, "--temperature", "temperature", "sampling temperature for all agents");
  flags.option(g, "--max-review-rounds", "max_review_rounds", "reviewing round cap");
  flags.option(g, "--max-test-rounds", "max_test_rounds", "testing round cap");
  flags.option(g, "--max-parse-retries", "max_parse_retries", "repair turns per unparseable reply");
  flags.flag(g, "--no-refinement", "refinement", "false", "skip the Refinement phase");
  flags.flag(g, "--no-reviewing", "reviewing", "false", "skip the Reviewing phase");
  flags.flag(g, "--no-testing", "testing", "false", "skip the Testing phase");
  flags.flag(g, "--refinement-fallback", "refinement_fallback", "true",
             "keep the generated model when refinement fails");

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "check BPMN text against the process constraints");
  v->add_option("file", val.file, "BPMN text file")->required();
  v->add_flag("--json", val.json, "machine-readable report");
  v->add_flag("--lenient", val.lenient, "unknown tags and attributes are warnings");
  v->add_option("--rules", val.rules, "file with extra rules (JSON array)");

  DiffArgs dif;
  auto* d = app.add_subcommand("diff", "graph edit distance between two models (.bpmt or .bpmn)");
  d->add_option("a", dif.a, "first model")->required();
  d->add_option("b", dif.b, "second model")->required();
  d->add_option("--algo", dif.algo, "greedy, tabu, ants or sa (default: all four)");
  d->add_flag("--exact", dif.exact, "exact distance (small models only)");
  d->add_flag("--serial", dif.serial, "run the four solvers one after another");
  flags.option(d, "--seed", "seed", "random seed (default 0)");
  flags.option(d, "--w-del", "w_del", "node deletion cost");
  flags.option(d, "--w-ins", "w_ins", "node insertion cost");
  flags.option(d, "--w-edge", "w_edge", "edge insertion/deletion cost");

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert", "convert between BPMN text (.bpmt) and BPMN 2.0 XML (.bpmn)");
  c->add_option("file", conv.file, "source file")->required();
  c->add_option("--to", conv.to, "target format")->required()->check(CLI::IsMember({"bpmt", "bpmn"}));
  c->add_option("-o,--output", conv.output, "output file (default: stdout)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "score human and candidate models of a case against its reference");
  e->add_option("dir", ev.dir, "case directory")->required();
  e->add_option("-o,--out", ev.output, "write report.json and report.txt here");
  e->add_flag("--json", ev.json, "print JSON instead of the table");
  e->add_flag("--serial", ev.serial, "score entities one after another");
  flags.option(e, "--seed", "seed", "random seed (default 0)");
  flags.option(e, "--w-del", "w_del", "node deletion cost");
  flags.option(e, "--w-ins", "w_ins", "node insertion cost");
  flags.option(e, "--w-edge", "w_edge", "edge insertion/deletion cost");

  std::vector<std::string> argv_store = {"mao"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    Settings settings;
    if (!config_file.empty()) settings.load_file(config_file);
    settings.load_env(env);
    flags.apply(settings);
    if (verbose) settings.echo(err);

    if (g->parsed()) return cmd_generate(gen, settings, out, err);
    if (v->parsed()) return cmd_validate(val, out);
    if (d->parsed()) return cmd_diff(dif, settings, out);
    if (c->parsed()) return cmd_convert(conv, out);
    if (e->parsed()) return cmd_eval(ev, settings, out, err);
  } catch (const UsageError& ex) {
    err << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const InputError& ex) {
    err << "error: " << ex.what() << "\n";
    return kFindings;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kPipelineFailure;
  }
  return kUsage;
}

}  // namespace mao::cli
