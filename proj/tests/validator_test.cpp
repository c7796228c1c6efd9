#include <gtest/gtest.h>

#include <set>

#include "json.hpp"
#include "mao/dsl.hpp"
#include "mao/text.hpp"
#include "mao/validator.hpp"
#include "support/fixtures.hpp"
#include "support/random_model.hpp"

namespace mao {
namespace {

using testing::expected_code;
using testing::fixture_root;
using testing::list_files;
using testing::read_file;

std::set<std::string> codes(const ValidationReport& r) {
  std::set<std::string> out;
  for (const auto& v : r.violations) out.insert(v.rule);
  return out;
}

const char* kDelivery = R"(<process name="delivery">
  <activity role="customer" action="prepare to send a package" id="a1"/>
  <exclusiveGateway id="g1">
    <branch condition="home pickup">
      <activity role="system" action="assign a courier for pickup" id="a2"/>
    </branch>
    <branch condition="self-service">
      <activity role="customer" action="go to the mailing point to send" id="a3"/>
    </branch>
  </exclusiveGateway>
</process>
)";

TEST(Registry, DefaultsCoverC0ToC8) {
  const auto reg = RuleRegistry::defaults();
  for (const char* code : {"C0", "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8"}) {
    EXPECT_NE(reg.find(code), nullptr) << code;
  }
  EXPECT_EQ(reg.find("C8")->severity, Severity::Warning);
  EXPECT_EQ(reg.find("C2")->description, "Every gateway must include two branches or more.");
}

TEST(Registry, RenderNumbered) {
  const std::string text = RuleRegistry::defaults().render_numbered();
  EXPECT_NE(text.find("C2. Every gateway must include two branches or more."), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
}

TEST(Registry, DuplicateCodeRejected) {
  auto reg = RuleRegistry::defaults();
  EXPECT_THROW(reg.add({"C2", "again", Severity::Error, "", std::nullopt}), std::invalid_argument);
}

TEST(Registry, BadRegexRejected) {
  auto reg = RuleRegistry::defaults();
  EXPECT_THROW(reg.load_json(R"([{"code":"X1","description":"d","severity":"error","suggestion":"s",
                                 "element":"activity","attribute":"role","require":"("}])"),
               std::invalid_argument);
}

TEST(Registry, JsonRuleAppliesWithoutCodeChanges) {
  auto reg = RuleRegistry::defaults();
  reg.load_json(R"([{"code":"C9","description":"Every activity names a role.","severity":"error",
                     "suggestion":"fill in the role attribute","element":"activity",
                     "attribute":"role","require":"\\S"}])");
  const auto bad = validate(R"(<process name="p"><activity role=" " action="x" id="a1"/></process>)", reg);
  ASSERT_EQ(codes(bad), std::set<std::string>{"C9"});
  EXPECT_EQ(bad.violations[0].path, "/nodes/0");
  EXPECT_EQ(bad.violations[0].suggestion, "fill in the role attribute");
  EXPECT_FALSE(bad.clean);
  EXPECT_TRUE(validate(kDelivery, reg).violations.empty());
}

TEST(Registry, JsonWarningRuleDoesNotBlock) {
  auto reg = RuleRegistry::defaults();
  reg.load_json(R"([{"code":"S1","description":"Gateway ids start with g.","severity":"warning",
                     "suggestion":"rename","element":"gateway","attribute":"id","require":"^g"}])");
  const auto r = validate(
      R"(<process name="p"><parallelGateway id="x1"><branch><activity role="r" action="a" id="a1"/></branch><branch><activity role="r" action="b" id="a2"/></branch></parallelGateway></process>)",
      reg);
  ASSERT_EQ(codes(r), std::set<std::string>{"S1"});
  EXPECT_TRUE(r.clean);
}

TEST(Validate, DeliveryIsClean) {
  const auto r = validate(kDelivery);
  EXPECT_TRUE(r.clean);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.subject, sha256_hex(kDelivery));
}

TEST(Validate, ParallelWithOneBranch) {
  const auto r = validate(
      R"(<process name="p"><parallelGateway id="g1"><branch><activity role="r" action="a" id="a1"/></branch></parallelGateway></process>)");
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].rule, "C2");
  EXPECT_EQ(r.violations[0].suggestion, "add a second branch or remove the gateway");
  EXPECT_EQ(r.violations[0].path, "/nodes/0");
  ASSERT_TRUE(r.violations[0].span.has_value());
  EXPECT_FALSE(r.clean);
}

TEST(Validate, ExclusiveBranchWithoutCondition) {
  const auto r = validate(
      R"(<process name="p"><exclusiveGateway id="g1"><branch condition="x"><activity role="r" action="a" id="a1"/></branch><branch><activity role="r" action="b" id="a2"/></branch></exclusiveGateway></process>)");
  ASSERT_EQ(codes(r), std::set<std::string>{"C4"});
  EXPECT_EQ(r.violations[0].path, "/nodes/0/branches/1");
}

TEST(Validate, LineNumbersPointAtElement) {
  const auto r = validate(read_file(fixture_root() / "validator/faulty/C1_duplicate_id.bpmt"));
  ASSERT_EQ(r.violations.size(), 1u);
  ASSERT_TRUE(r.violations[0].span.has_value());
  EXPECT_EQ(r.violations[0].span->start.line, 3u);
  EXPECT_EQ(r.violations[0].path, "/nodes/1");
}

TEST(Validate, LenientDowngradesUnknownAttribute) {
  const std::string text = read_file(fixture_root() / "validator/faulty/C6_unknown_activity_attribute.bpmt");
  const auto strict = validate(text);
  EXPECT_FALSE(strict.clean);
  const auto lenient = validate(text, RuleRegistry::defaults(), {.lenient = true});
  ASSERT_EQ(codes(lenient), std::set<std::string>{"C6"});
  EXPECT_EQ(lenient.violations[0].severity, Severity::Warning);
  EXPECT_TRUE(lenient.clean);
}

TEST(Validate, SortedBySourcePosition) {
  const auto r = validate(R"(<process name="p">
  <activity role="r" action="" id="a1"/>
  <parallelGateway id="a1"><branch><activity role="r" action="x" id="a3"/></branch></parallelGateway>
  <activity role="r" action=" " id="a4"/>
</process>)");
  std::vector<std::size_t> lines;
  for (const auto& v : r.violations) {
    ASSERT_TRUE(v.span.has_value()) << v.rule;
    lines.push_back(v.span->start.line);
  }
  EXPECT_TRUE(std::is_sorted(lines.begin(), lines.end()));
  EXPECT_EQ(codes(r), (std::set<std::string>{"C1", "C2", "C3"}));
}

TEST(Validate, Deterministic) {
  const std::string text = read_file(fixture_root() / "validator/faulty/C5_branch_in_branch.bpmt");
  EXPECT_EQ(render_report(validate(text), ReportFormat::Machine),
            render_report(validate(text), ReportFormat::Machine));
}

TEST(Validate, ArbitraryBytesNeverThrow) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    std::string s(static_cast<std::size_t>(rng() % 80), '\0');
    for (char& c : s) c = "<>/=\"' abc\nprocess activity branch"[rng() % 34];
    const auto r = validate(s);
    EXPECT_FALSE(r.clean && r.violations.empty() && !parse(s).ok()) << s;
  }
}

class FaultyFixture : public ::testing::TestWithParam<std::filesystem::path> {};

TEST_P(FaultyFixture, FlagsExactlyTheIntendedRule) {
  const auto r = validate(read_file(GetParam()));
  EXPECT_EQ(codes(r), std::set<std::string>{expected_code(GetParam())})
      << render_report(r, ReportFormat::Human);
}

INSTANTIATE_TEST_SUITE_P(Corpus, FaultyFixture,
                         ::testing::ValuesIn(list_files(fixture_root() / "validator/faulty", ".bpmt")),
                         [](const auto& info) { return info.param.stem().string(); });

class CleanFixture : public ::testing::TestWithParam<std::filesystem::path> {};

TEST_P(CleanFixture, NoFindings) {
  const auto r = validate(read_file(GetParam()));
  EXPECT_TRUE(r.violations.empty()) << render_report(r, ReportFormat::Human);
  EXPECT_TRUE(r.clean);
}

INSTANTIATE_TEST_SUITE_P(Corpus, CleanFixture,
                         ::testing::ValuesIn(list_files(fixture_root() / "validator/clean", ".bpmt")),
                         [](const auto& info) { return "f" + info.param.stem().string(); });

TEST(Corpus, EveryRuleHasAFaultyFixture) {
  std::set<std::string> seen;
  for (const auto& p : list_files(fixture_root() / "validator/faulty", ".bpmt")) seen.insert(expected_code(p));
  for (const auto& rule : RuleRegistry::defaults().rules()) EXPECT_TRUE(seen.count(rule.code)) << rule.code;
  EXPECT_GE(list_files(fixture_root() / "validator/faulty", ".bpmt").size(), 20u);
  EXPECT_GE(list_files(fixture_root() / "validator/clean", ".bpmt").size(), 20u);
}

TEST(Property, SerializedValidModelsAreClean) {
  testing::ModelGenerator gen(0x5eed);
  for (int i = 0; i < 300; ++i) {
    const ProcessModel m = gen.next();
    const auto r = validate(serialize(m));
    EXPECT_TRUE(r.clean);
    for (const auto& v : r.violations) EXPECT_EQ(v.rule, "C8") << serialize(m);
  }
}

TEST(Property, SingleStructuralFaultIsFound) {
  testing::ModelGenerator gen(99);
  for (int i = 0; i < 200; ++i) {
    ProcessModel m = gen.next();
    const auto ids = collect_ids(m);
    std::string expected;
    switch (i % 3) {
      case 0:
        m.nodes.push_back(Activity{ids.front(), "r", "dup", std::nullopt});
        expected = "C1";
        break;
      case 1:
        m.nodes.push_back(Activity{"fresh", "r", "  ", std::nullopt});
        expected = "C3";
        break;
      default: {
        Gateway g{"gfresh", GatewayKind::Parallel, {Branch{std::nullopt, {}}}};
        m.nodes.push_back(g);
        expected = "C2";
      }
    }
    const auto r = validate(render_unchecked(m));
    EXPECT_FALSE(r.clean);
    std::set<std::string> errors;
    for (const auto& v : r.violations) {
      if (v.severity == Severity::Error) errors.insert(v.rule);
    }
    EXPECT_EQ(errors, std::set<std::string>{expected}) << render_unchecked(m);
  }
}

TEST(Render, EmptyReport) {
  EXPECT_EQ(render_report(validate(kDelivery), ReportFormat::Human), "OK: no format hallucinations found\n");
}

TEST(Render, HumanLine) {
  const auto r = validate(read_file(fixture_root() / "validator/faulty/C2_parallel_one_branch.bpmt"));
  const std::string text = render_report(r, ReportFormat::Human);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(text.rfind("C2 at /nodes/0 (line 2): ", 0), 0u) << text;
  EXPECT_NE(text.find("add a second branch or remove the gateway"), std::string::npos);
}

TEST(Render, MachineJson) {
  const auto r = validate(read_file(fixture_root() / "validator/faulty/C2_parallel_one_branch.bpmt"));
  const auto doc = nlohmann::json::parse(render_report(r, ReportFormat::Machine));
  EXPECT_EQ(doc["subject"], r.subject);
  EXPECT_EQ(doc["clean"], false);
  ASSERT_EQ(doc["violations"].size(), 1u);
  const auto& v = doc["violations"][0];
  for (const char* key : {"rule", "location", "line", "message", "suggestion"}) EXPECT_TRUE(v.contains(key)) << key;
  EXPECT_EQ(v["rule"], "C2");
  EXPECT_EQ(v["location"], "/nodes/0");
  EXPECT_EQ(v["line"], 2);
}

TEST(Render, MachineLineNullWithoutSpan) {
  ValidationReport r;
  r.subject = "x";
  r.clean = false;
  r.violations.push_back({"C7", Severity::Error, "/", std::nullopt, "empty", "add"});
  const auto doc = nlohmann::json::parse(render_report(r, ReportFormat::Machine));
  EXPECT_TRUE(doc["violations"][0]["line"].is_null());
}

}  // namespace
}  // namespace mao
