#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "httplib.h"
#include "mao/dsl.hpp"
#include "mao/pipeline.hpp"
#include "mao/text.hpp"
#include "support/fixtures.hpp"

namespace mao {
namespace {

using testing::fixture_root;
using testing::read_file;

const char* kValid =
    "<process name=\"p\">\n"
    "  <activity role=\"clerk\" action=\"take the order\" id=\"a1\"/>\n"
    "  <activity role=\"clerk\" action=\"ship the order\" id=\"a2\"/>\n"
    "</process>\n";

const char* kSplit =
    "<process name=\"p\">\n"
    "  <activity role=\"clerk\" action=\"take the order\" id=\"a1\"/>\n"
    "  <activity role=\"clerk\" action=\"pack the order\" id=\"a3\"/>\n"
    "  <activity role=\"clerk\" action=\"ship the order\" id=\"a2\"/>\n"
    "</process>\n";

const char* kSwapped =
    "<process name=\"p\">\n"
    "  <activity role=\"clerk\" action=\"ship the order\" id=\"a2\"/>\n"
    "  <activity role=\"clerk\" action=\"take the order\" id=\"a1\"/>\n"
    "</process>\n";

const char* kOneBranch =
    "<process name=\"p\">\n"
    "  <activity role=\"clerk\" action=\"take the order\" id=\"a1\"/>\n"
    "  <parallelGateway id=\"g1\">\n"
    "    <branch>\n"
    "      <activity role=\"clerk\" action=\"ship the order\" id=\"a2\"/>\n"
    "    </branch>\n"
    "  </parallelGateway>\n"
    "</process>\n";

const char* kMissingCondition =
    "<process name=\"p\">\n"
    "  <exclusiveGateway id=\"g1\">\n"
    "    <branch condition=\"paid\"><activity role=\"clerk\" action=\"ship\" id=\"a1\"/></branch>\n"
    "    <branch><activity role=\"clerk\" action=\"remind\" id=\"a2\"/></branch>\n"
    "  </exclusiveGateway>\n"
    "</process>\n";

ProcessModel model_of(const char* text) { return *parse(text).model; }

struct Harness {
  explicit Harness(std::vector<ReplayEntry> script) : replay(std::make_shared<ReplayBackend>(std::move(script))) {
    cfg.backend = replay;
  }
  std::shared_ptr<ReplayBackend> replay;
  PipelineConfig cfg;
};

std::vector<ReplayEntry> load_script(std::optional<Phase> without = std::nullopt) {
  const auto text = read_file(fixture_root() / "pipeline" / "full.jsonl");
  std::vector<ReplayEntry> out;
  for (const std::string& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (without && j["phase"] == to_string(*without)) continue;
    out.push_back({j["phase"], j["content"]});
  }
  return out;
}

std::string requirement() { return read_file(fixture_root() / "pipeline" / "requirement.txt"); }

void expect_phase_order(const ChatTranscript& t) {
  for (std::size_t i = 0; i < t.messages().size(); ++i) {
    EXPECT_EQ(t.messages()[i].index, i);
    if (i > 0) EXPECT_LE(t.messages()[i - 1].phase, t.messages()[i].phase);
  }
}

// --- prompts and role cards -------------------------------------------------

TEST(Prompts, GenerationPromptHasComponentsInOrder) {
  PipelineConfig cfg;
  cfg.few_shot_examples.push_back("<process name=\"second\">\n</process>\n");
  const std::string p = build_generation_prompt("Ship customer orders.", cfg);
  const auto req = p.find("Ship customer orders.");
  const auto fmt = p.find("Process format");
  const auto c2 = p.find(cfg.registry.find("C2")->description);
  const auto ex1 = p.find(cfg.few_shot_examples[0]);
  const auto ex2 = p.find(cfg.few_shot_examples[1]);
  const auto sbs = p.find("step by step");
  for (auto pos : {req, fmt, c2, ex1, ex2, sbs}) ASSERT_NE(pos, std::string::npos);
  EXPECT_LT(req, fmt);
  EXPECT_LT(fmt, c2);
  EXPECT_LT(c2, ex1);
  EXPECT_LT(ex1, ex2);
  EXPECT_LT(ex2, sbs);
  EXPECT_NE(p.find("C2. "), std::string::npos);
}

TEST(Prompts, EmptyRequirementRejected) {
  EXPECT_THROW(build_generation_prompt("  \n", PipelineConfig{}), std::invalid_argument);
}

TEST(Prompts, RoleCardStances) {
  EXPECT_EQ(role_card(Role::TeamLeader).stance, Stance::Instructor);
  EXPECT_EQ(role_card(Role::ProcessDesignExpert).stance, Stance::Assistant);
  EXPECT_EQ(role_card(Role::ProcessReviewer).stance, Stance::Assistant);
  for (Role r : {Role::TeamLeader, Role::ProcessDesignExpert, Role::ProcessReviewer}) {
    EXPECT_NE(role_card(r).system_prompt.find("<activity"), std::string::npos);
  }
}

TEST(Prompts, ConfigChecks) {
  PipelineConfig cfg;
  EXPECT_THROW(cfg.check(), std::invalid_argument);
  cfg.backend = std::make_shared<ReplayBackend>(std::vector<ReplayEntry>{});
  EXPECT_NO_THROW(cfg.check());
  cfg.max_test_rounds = 0;
  EXPECT_THROW(cfg.check(), std::invalid_argument);
  EXPECT_EQ(parse_phase("reviewing"), Phase::Reviewing);
  EXPECT_THROW(parse_phase("review"), std::invalid_argument);
}

// --- replay backend ---------------------------------------------------------

TEST(Replay, ExhaustedOnThirdCall) {
  ReplayBackend b(std::vector<ReplayEntry>{{"Generation", "one"}, {"Generation", "two"}});
  ChatRequest req{{{"user", "hi"}}, {}, "Generation"};
  EXPECT_EQ(b.complete(req), "one");
  EXPECT_EQ(b.complete(req), "two");
  EXPECT_THROW(b.complete(req), ReplayExhausted);
}

TEST(Replay, EmptyMessagesIsPreconditionError) {
  ReplayBackend b(std::vector<ReplayEntry>{{"Generation", "one"}});
  EXPECT_THROW(b.complete({{}, {}, "Generation"}), std::invalid_argument);
  EXPECT_EQ(b.remaining(), 1u);
}

TEST(Replay, PhaseMismatchIsReported) {
  ReplayBackend b(std::vector<ReplayEntry>{{"Testing", "one"}});
  EXPECT_THROW(b.complete({{{"user", "hi"}}, {}, "Generation"}), ReplayError);
}

TEST(Replay, JsonlParsing) {
  auto b = ReplayBackend::from_jsonl("{\"phase\":\"Generation\",\"content\":\"a\\nb\"}\n\n");
  EXPECT_EQ(b.remaining(), 1u);
  EXPECT_EQ(b.complete({{{"user", "x"}}, {}, "Generation"}), "a\nb");
  EXPECT_THROW(ReplayBackend::from_jsonl("{\"phase\":1}\n"), ReplayError);
  EXPECT_THROW(ReplayBackend::from_jsonl("not json\n"), ReplayError);
}

// --- HTTP backend against a local server ------------------------------------

struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  template <typename Handler>
  explicit LocalServer(Handler h) {
    server.Post("/v1/chat/completions", h);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    thread.join();
  }
  HttpOptions options() const {
    HttpOptions o;
    o.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/";
    o.api_key = "k";
    o.model = "m";
    o.backoff = std::chrono::milliseconds(1);
    o.timeout = std::chrono::seconds(5);
    return o;
  }
};

const std::string kOkBody = R"({"choices":[{"message":{"role":"assistant","content":"hello"}}]})";

TEST(Http, RateLimitThenSuccess) {
  std::atomic<int> calls{0};
  std::string seen;
  LocalServer srv([&](const httplib::Request& req, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 429;
      return;
    }
    seen = req.body;
    EXPECT_EQ(req.get_header_value("Authorization"), "Bearer k");
    res.set_content(kOkBody, "application/json");
  });
  HttpBackend b(srv.options());
  EXPECT_EQ(b.complete({{{"system", "s"}, {"user", "u"}}, {0.25}, "Generation"}), "hello");
  EXPECT_EQ(calls.load(), 2);
  const auto j = nlohmann::json::parse(seen);
  EXPECT_EQ(j["model"], "m");
  EXPECT_EQ(j["temperature"], 0.25);
  ASSERT_EQ(j["messages"].size(), 2u);
  EXPECT_EQ(j["messages"][1]["role"], "user");
}

TEST(Http, GivesUpAfterThreeAttempts) {
  std::atomic<int> calls{0};
  LocalServer srv([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 503;
  });
  HttpBackend b(srv.options());
  try {
    b.complete({{{"user", "u"}}, {}, "Generation"});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::Transport);
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST(Http, ClientErrorsAreNotRetried) {
  std::atomic<int> calls{0};
  LocalServer srv([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 401;
  });
  HttpBackend b(srv.options());
  EXPECT_THROW(b.complete({{{"user", "u"}}, {}, "Generation"}), BackendError);
  EXPECT_EQ(calls.load(), 1);
}

TEST(Http, MalformedBody) {
  LocalServer srv([&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[]})", "application/json");
  });
  HttpBackend b(srv.options());
  try {
    b.complete({{{"user", "u"}}, {}, "Generation"});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::Malformed);
  }
}

TEST(Http, ConstructionAndPreconditions) {
  EXPECT_THROW(HttpBackend(HttpOptions{"localhost:1", "", "", 3}), std::invalid_argument);
  HttpBackend b(HttpOptions{"http://127.0.0.1:1", "", "", 1, std::chrono::milliseconds(1)});
  EXPECT_THROW(b.complete({{}, {}, "Generation"}), std::invalid_argument);
  try {
    b.complete({{{"user", "u"}}, {}, "Generation"});
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_EQ(e.kind(), BackendError::Kind::Transport);
  }
}

// --- phases -----------------------------------------------------------------

TEST(Generation, SingleValidReply) {
  Harness h(std::vector<ReplayEntry>{{"Generation", std::string("Here you go:\n") + kValid}});
  Session s(h.cfg);
  EXPECT_EQ(run_generation("Ship orders.", s), model_of(kValid));
  ASSERT_EQ(s.transcript.messages().size(), 2u);
  EXPECT_EQ(s.transcript.messages()[0].speaker, Role::TeamLeader);
  EXPECT_EQ(s.transcript.messages()[1].speaker, Role::ProcessDesignExpert);
  EXPECT_EQ(s.transcript.messages()[1].temperature, 0.0);
  EXPECT_FALSE(s.transcript.messages()[0].temperature);
}

TEST(Generation, RepairTurnQuotesParseErrors) {
  Harness h(std::vector<ReplayEntry>{{"Generation", "<process name=\"p\"><activity role=\"x\" id=\"a1\"/></process>"},
             {"Generation", kValid}});
  Session s(h.cfg);
  EXPECT_EQ(run_generation("Ship orders.", s), model_of(kValid));
  EXPECT_EQ(s.transcript.count(Phase::Generation, Role::ProcessDesignExpert), 2u);
  const std::string& repair = s.transcript.messages()[2].content;
  EXPECT_NE(repair.find("action"), std::string::npos);
  EXPECT_NE(repair.find("1:"), std::string::npos);
  EXPECT_NE(repair.find("missing-attribute"), std::string::npos);
}

TEST(Generation, MissingBlockTriggersRepair) {
  Harness h(std::vector<ReplayEntry>{{"Generation", "I would model this as three steps."}, {"Generation", kValid}});
  Session s(h.cfg);
  EXPECT_EQ(run_generation("Ship orders.", s), model_of(kValid));
  EXPECT_NE(s.transcript.messages()[2].content.find("no <process>"), std::string::npos);
}

TEST(Generation, AllInvalidFails) {
  Harness h(std::vector<ReplayEntry>{{"Generation", "nope"}, {"Generation", "<process>"}, {"Generation", "still nope"}});
  Session s(h.cfg);
  try {
    run_generation("Ship orders.", s);
    FAIL();
  } catch (const GenerationFailed& e) {
    EXPECT_EQ(e.phase(), Phase::Generation);
    EXPECT_EQ(e.transcript().messages().size(), 6u);
  }
  EXPECT_EQ(h.replay->remaining(), 0u);
}

TEST(Generation, StructuralDefectsPassSyntaxGate) {
  Harness h(std::vector<ReplayEntry>{{"Generation", kOneBranch}});
  Session s(h.cfg);
  EXPECT_FALSE(structural_check(run_generation("Ship orders.", s)).empty());
}

TEST(Refinement, DisabledIsIdentity) {
  Harness h({});
  h.cfg.refinement = false;
  Session s(h.cfg);
  EXPECT_EQ(run_refinement(model_of(kValid), "r", s), model_of(kValid));
  EXPECT_TRUE(s.transcript.messages().empty());
}

TEST(Refinement, SplitAddsOneNode) {
  Harness h(std::vector<ReplayEntry>{{"Refinement", kSplit}});
  Session s(h.cfg);
  const auto before = model_of(kValid);
  const auto after = run_refinement(before, "r", s);
  EXPECT_EQ(activity_count(after), activity_count(before) + 1);
  EXPECT_NE(s.transcript.messages()[0].content.find(render_unchecked(before)), std::string::npos);
}

TEST(Refinement, DroppedConditionCausesRepairTurn) {
  Harness h(std::vector<ReplayEntry>{{"Refinement", kMissingCondition}, {"Refinement", kSplit}});
  Session s(h.cfg);
  run_refinement(model_of(kValid), "r", s);
  EXPECT_EQ(s.transcript.count(Phase::Refinement, Role::ProcessDesignExpert), 2u);
  EXPECT_NE(s.transcript.messages()[2].content.find("condition"), std::string::npos);
}

TEST(Refinement, FailureAndFallback) {
  std::vector<ReplayEntry> junk(3, {"Refinement", "no model"});
  {
    Harness h(junk);
    Session s(h.cfg);
    EXPECT_THROW(run_refinement(model_of(kValid), "r", s), RefinementFailed);
  }
  Harness h(junk);
  h.cfg.refinement_fallback = true;
  Session s(h.cfg);
  EXPECT_EQ(run_refinement(model_of(kValid), "r", s), model_of(kValid));
  ASSERT_EQ(s.warnings.size(), 1u);
}

TEST(Reviewing, NoIssuesIsOneRound) {
  Harness h(std::vector<ReplayEntry>{{"Reviewing", "NO_ISSUES"}});
  Session s(h.cfg);
  const auto out = run_reviewing(model_of(kValid), "r", s);
  EXPECT_EQ(out.model, model_of(kValid));
  ASSERT_EQ(out.log.rounds.size(), 1u);
  EXPECT_EQ(out.log.rounds[0].outcome, ReviewReply::Kind::NoIssues);
  EXPECT_EQ(s.transcript.count(Phase::Reviewing), 2u);
}

TEST(Reviewing, SuggestionThenNoIssues) {
  Harness h(std::vector<ReplayEntry>{{"Reviewing", "SH1 | a1,a2 | shipping comes after taking the order"},
             {"Reviewing", kSwapped},
             {"Reviewing", "NO_ISSUES"}});
  Session s(h.cfg);
  const auto out = run_reviewing(model_of(kValid), "r", s);
  EXPECT_EQ(out.model, model_of(kSwapped));
  ASSERT_EQ(out.log.rounds.size(), 2u);
  EXPECT_EQ(out.log.rounds[0].suggestions.size(), 1u);
  EXPECT_EQ(out.log.rounds[0].model_hash, model_hash(model_of(kSwapped)));
  EXPECT_EQ(out.log.rounds[1].outcome, ReviewReply::Kind::NoIssues);
  // the expert prompt forwards the suggestion verbatim
  EXPECT_NE(s.transcript.messages()[2].content.find("SH1 | a1,a2 | shipping"), std::string::npos);
}

TEST(Reviewing, CapStopsNeverSatisfiedReviewer) {
  Harness h(std::vector<ReplayEntry>{{"Reviewing", "SH1 | a1 | x"}, {"Reviewing", kSwapped},
             {"Reviewing", "SH1 | a1 | x"}, {"Reviewing", kValid},
             {"Reviewing", "SH1 | a1 | x"}, {"Reviewing", kSwapped},
             {"Reviewing", "SH1 | a1 | x"}});
  Session s(h.cfg);
  const auto out = run_reviewing(model_of(kValid), "r", s);
  EXPECT_EQ(out.log.rounds.size(), 3u);
  EXPECT_EQ(s.transcript.count(Phase::Reviewing, Role::ProcessReviewer), 3u);
  EXPECT_EQ(h.replay->remaining(), 1u);
  EXPECT_FALSE(out.log.stalled);
}

TEST(Reviewing, UnchangedRevisionStalls) {
  Harness h(std::vector<ReplayEntry>{{"Reviewing", "SH2 | a2 | x"}, {"Reviewing", kValid}, {"Reviewing", "SH2 | a2 | x"}});
  Session s(h.cfg);
  const auto out = run_reviewing(model_of(kValid), "r", s);
  EXPECT_TRUE(out.log.stalled);
  EXPECT_EQ(out.log.rounds.size(), 1u);
  EXPECT_EQ(h.replay->remaining(), 1u);
}

TEST(Reviewing, UnparseableReplyConsumesRound) {
  Harness h(std::vector<ReplayEntry>{{"Reviewing", "looks fine I guess"}, {"Reviewing", "NO_ISSUES"}});
  Session s(h.cfg);
  const auto out = run_reviewing(model_of(kValid), "r", s);
  ASSERT_EQ(out.log.rounds.size(), 2u);
  EXPECT_EQ(out.log.rounds[0].outcome, ReviewReply::Kind::ParseFailure);
  EXPECT_EQ(s.transcript.count(Phase::Reviewing, Role::ProcessDesignExpert), 0u);
}

TEST(Reviewing, SeedsComeFromDeterministicLint) {
  const char* dup =
      "<process name=\"p\">\n"
      "  <activity role=\"clerk\" action=\"take the order\" id=\"a1\"/>\n"
      "  <activity role=\"clerk\" action=\"take the order\" id=\"a2\"/>\n"
      "</process>\n";
  Harness h(std::vector<ReplayEntry>{{"Reviewing", "NO_ISSUES"}});
  Session s(h.cfg);
  run_reviewing(model_of(dup), "r", s);
  EXPECT_NE(s.transcript.messages()[0].content.find("SH2 | a1,a2"), std::string::npos);
}

TEST(Testing, CleanInputValidatesOnce) {
  Harness h({});
  Session s(h.cfg);
  const auto out = run_testing(kValid, s);
  EXPECT_EQ(out.reports.size(), 1u);
  EXPECT_TRUE(out.clean());
  EXPECT_EQ(s.transcript.count(Phase::Testing, Role::ProcessDesignExpert), 0u);
}

TEST(Testing, C2RepairedInOneRound) {
  Harness h(std::vector<ReplayEntry>{{"Testing", kSplit}});
  Session s(h.cfg);
  const auto out = run_testing(kOneBranch, s);
  ASSERT_EQ(out.reports.size(), 2u);
  EXPECT_EQ(out.reports[0].violations.at(0).rule, "C2");
  EXPECT_TRUE(out.clean());
  EXPECT_EQ(out.model, model_of(kSplit));
  EXPECT_NE(s.transcript.messages()[2].content.find("\"C2\""), std::string::npos);
}

TEST(Testing, NeverFixedStopsAtCap) {
  std::vector<ReplayEntry> script(3, {"Testing", kOneBranch});
  Harness h(script);
  Session s(h.cfg);
  const auto out = run_testing(kOneBranch, s);
  EXPECT_FALSE(out.clean());
  EXPECT_EQ(out.fix_rounds, 3);
  EXPECT_EQ(out.reports.size(), 4u);
  EXPECT_EQ(s.transcript.count(Phase::Testing, Role::ProcessDesignExpert), 3u);
}

TEST(Testing, RawTextWithoutBlockIsValidated) {
  Harness h(std::vector<ReplayEntry>{{"Testing", "sorry, I cannot"}});
  h.cfg.max_test_rounds = 1;
  Session s(h.cfg);
  const auto out = run_testing("<process", s);
  EXPECT_FALSE(out.clean());
  EXPECT_EQ(out.text, "sorry, I cannot");
  EXPECT_FALSE(out.model);
}

// --- whole pipeline ---------------------------------------------------------

TEST(Pipeline, GoldenRun) {
  Harness h(load_script());
  const auto r = run_pipeline(requirement(), h.cfg);
  EXPECT_EQ(r.final_text, read_file(fixture_root() / "pipeline" / "model.bpmt"));
  ASSERT_TRUE(r.clean);
  EXPECT_TRUE(*r.clean);
  EXPECT_EQ(r.transcript.count(Phase::Generation), 2u);
  EXPECT_EQ(r.transcript.count(Phase::Refinement), 2u);
  EXPECT_EQ(r.transcript.count(Phase::Reviewing), 6u);
  EXPECT_EQ(r.transcript.count(Phase::Testing), 5u);
  ASSERT_TRUE(r.review);
  EXPECT_EQ(r.review->rounds.size(), 2u);
  EXPECT_EQ(r.test_reports.size(), 2u);
  EXPECT_EQ(h.replay->remaining(), 0u);
  expect_phase_order(r.transcript);
  EXPECT_EQ(validate(r.final_text).clean, true);
}

TEST(Pipeline, ReplayIsDeterministic) {
  Harness a(load_script()), b(load_script());
  const auto ra = run_pipeline(requirement(), a.cfg);
  const auto rb = run_pipeline(requirement(), b.cfg);
  EXPECT_EQ(to_json(ra).dump(), to_json(rb).dump());
  EXPECT_EQ(ra.transcript.to_jsonl(), rb.transcript.to_jsonl());
  EXPECT_EQ(ra.final_text, rb.final_text);
}

TEST(Pipeline, TranscriptJsonl) {
  Harness h(load_script());
  const auto r = run_pipeline(requirement(), h.cfg);
  const auto lines = split_lines(r.transcript.to_jsonl());
  ASSERT_EQ(lines.size(), r.transcript.messages().size() + 1);  // trailing newline
  const auto j = nlohmann::json::parse(lines[1]);
  EXPECT_EQ(j["index"], 1);
  EXPECT_EQ(j["phase"], "Generation");
  EXPECT_EQ(j["speaker"], "ProcessDesignExpert");
  EXPECT_EQ(j["temperature"], 0.0);
}

class Ablation : public ::testing::TestWithParam<Phase> {};

TEST_P(Ablation, RemovesExactlyItsPhase) {
  const Phase off = GetParam();
  Harness full(load_script());
  const auto base = run_pipeline(requirement(), full.cfg);

  Harness h(load_script(off));
  h.cfg.refinement = off != Phase::Refinement;
  h.cfg.reviewing = off != Phase::Reviewing;
  h.cfg.testing = off != Phase::Testing;
  const auto r = run_pipeline(requirement(), h.cfg);
  EXPECT_EQ(h.replay->remaining(), 0u);
  expect_phase_order(r.transcript);
  for (Phase p : kAllPhases) {
    if (p == off) {
      EXPECT_EQ(r.transcript.count(p), 0u) << to_string(p);
    } else {
      EXPECT_EQ(r.transcript.count(p), base.transcript.count(p)) << to_string(p);
    }
  }
  const auto j = to_json(r);
  if (off == Phase::Testing) {
    EXPECT_FALSE(r.clean);
    EXPECT_TRUE(r.test_reports.empty());
    EXPECT_FALSE(j.contains("testing"));
    EXPECT_FALSE(j.contains("clean"));
  } else {
    EXPECT_EQ(r.clean, std::optional<bool>(true));
  }
  EXPECT_EQ(r.review.has_value(), off != Phase::Reviewing);
  EXPECT_EQ(j.contains("review"), off != Phase::Reviewing);
}

INSTANTIATE_TEST_SUITE_P(Phases, Ablation,
                         ::testing::Values(Phase::Refinement, Phase::Reviewing, Phase::Testing),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Pipeline, FailureCarriesPartialTranscript) {
  auto script = load_script();
  script.resize(3);  // runs out inside Reviewing
  Harness h(script);
  try {
    run_pipeline(requirement(), h.cfg);
    FAIL();
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.phase(), Phase::Reviewing);
    EXPECT_EQ(e.transcript().count(Phase::Reviewing), 3u);  // the expert prompt went out, no reply came back
    EXPECT_NE(std::string(e.what()).find("exhausted"), std::string::npos);
  }
}

TEST(Pipeline, GenerationFailureIsPipelineError) {
  Harness h(std::vector<ReplayEntry>(3, {"Generation", "nothing"}));
  try {
    run_pipeline("r", h.cfg);
    FAIL();
  } catch (const GenerationFailed& e) {
    EXPECT_EQ(e.transcript().messages().size(), 6u);
  }
}

// Random scripts: caps hold and phases stay ordered whatever the agents say.
TEST(PipelineProperty, CapsAndOrderingOnRandomScripts) {
  const std::vector<std::string> expert = {kValid, kSplit, kSwapped, kOneBranch, kMissingCondition, "no model"};
  const std::vector<std::string> reviewer = {"NO_ISSUES", "SH1 | a1 | move", "SH2 | a2 | drop", "???"};
  std::mt19937_64 gen(20261018);
  for (int trial = 0; trial < 150; ++trial) {
    // The replay backend ignores phase tags when empty, so one pool serves every turn.
    std::vector<ReplayEntry> script;
    for (int i = 0; i < 60; ++i) {
      const bool review_turn = gen() % 3 == 0;
      const auto& pool = review_turn ? reviewer : expert;
      script.push_back({"", pool[gen() % pool.size()]});
    }
    Harness h(script);
    h.cfg.refinement = gen() % 2;
    h.cfg.reviewing = gen() % 2;
    h.cfg.testing = gen() % 2;
    h.cfg.max_review_rounds = 1 + static_cast<int>(gen() % 3);
    h.cfg.max_test_rounds = 1 + static_cast<int>(gen() % 3);
    h.cfg.max_parse_retries = static_cast<int>(gen() % 3);
    try {
      const auto r = run_pipeline("Ship orders.", h.cfg);
      expect_phase_order(r.transcript);
      const int tries = h.cfg.max_parse_retries + 1;
      EXPECT_LE(r.transcript.count(Phase::Generation, Role::ProcessDesignExpert), static_cast<std::size_t>(tries));
      EXPECT_LE(r.transcript.count(Phase::Reviewing, Role::ProcessReviewer),
                static_cast<std::size_t>(h.cfg.max_review_rounds));
      EXPECT_LE(r.transcript.count(Phase::Testing, Role::ProcessDesignExpert),
                static_cast<std::size_t>(h.cfg.max_test_rounds));
      for (Phase p : kAllPhases) {
        if (!h.cfg.enabled(p)) EXPECT_EQ(r.transcript.count(p), 0u);
      }
      if (r.clean) {
        EXPECT_EQ(*r.clean, validate(r.final_text).clean);
      } else {
        EXPECT_FALSE(h.cfg.testing);
      }
      if (r.final_model && (!r.clean || *r.clean)) {
        EXPECT_EQ(*parse(r.final_text, {.lenient = true}).model, *r.final_model);
      }
    } catch (const PipelineError& e) {
      expect_phase_order(e.transcript());
    }
  }
}

}  // namespace
}  // namespace mao
