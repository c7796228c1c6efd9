#include <gtest/gtest.h>

#include "mao/dsl.hpp"
#include "mao/semantic_lint.hpp"
#include "support/random_model.hpp"

namespace mao {
namespace {

ProcessModel parsed(std::string_view text) {
  auto out = parse(text);
  EXPECT_TRUE(out.ok()) << text;
  return *out.model;
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

TEST(Categories, FourWithExamples) {
  const auto& cats = lint_categories();
  ASSERT_EQ(cats.size(), 4u);
  for (std::size_t i = 0; i < cats.size(); ++i) {
    EXPECT_EQ(to_string(cats[i].code), "SH" + std::to_string(i + 1));
    EXPECT_FALSE(cats[i].example.empty());
    EXPECT_FALSE(cats[i].description.empty());
  }
}

TEST(Lint, RepeatedPizza) {
  const auto m = parsed(R"(<process name="pizza">
  <activity role="cook" action="Prepare pizza" id="a1"/>
  <activity role="cook" action="prepare  pizza." id="a2"/>
  <activity role="waiter" action="serve" id="a3"/>
  <activity role="cook" action="PREPARE PIZZA" id="a4"/>
</process>)");
  const auto found = deterministic_lint(m);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].category, LintCode::SH2);
  EXPECT_EQ(found[0].targets, (std::vector<std::string>{"a1", "a2", "a4"}));
  EXPECT_NE(found[0].proposal.find("3 times"), std::string::npos);
}

TEST(Lint, DeliveryIsQuiet) { EXPECT_TRUE(deterministic_lint(parsed(kDelivery)).empty()); }

TEST(Lint, IdenticalParallelBranches) {
  const auto m = parsed(R"(<process name="p">
  <parallelGateway id="g1">
    <branch><activity role="r" action="pack goods" id="a1"/></branch>
    <branch><activity role="r" action="pack goods" id="a2"/></branch>
  </parallelGateway>
</process>)");
  const auto found = deterministic_lint(m);
  ASSERT_EQ(found.size(), 2u);
  EXPECT_EQ(found[0].category, LintCode::SH3);
  EXPECT_EQ(found[0].targets, std::vector<std::string>{"g1"});
  EXPECT_EQ(found[1].category, LintCode::SH2);
}

TEST(Lint, EmptyBranch) {
  const auto m = parsed(R"(<process name="p">
  <exclusiveGateway id="g1">
    <branch condition="needs approval"><activity role="r" action="approve" id="a1"/></branch>
    <branch condition="otherwise"></branch>
  </exclusiveGateway>
</process>)");
  const auto found = deterministic_lint(m);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].category, LintCode::SH4);
  EXPECT_EQ(found[0].targets, std::vector<std::string>{"g1"});
  EXPECT_NE(found[0].proposal.find("branch 2"), std::string::npos);
}

TEST(Lint, TargetsAlwaysExist) {
  testing::ModelGenerator gen(21, {.small_vocabulary = true});
  for (int i = 0; i < 200; ++i) {
    const auto m = gen.next();
    const auto ids = collect_ids(m);
    for (const auto& s : deterministic_lint(m)) {
      for (const auto& t : s.targets) EXPECT_NE(std::find(ids.begin(), ids.end(), t), ids.end());
    }
  }
}

TEST(Prompt, ContainsModelCategoriesAndContract) {
  const std::string prompt = build_review_prompt(kDelivery, lint_categories());
  EXPECT_NE(prompt.find(kDelivery), std::string::npos);
  for (const auto& c : lint_categories()) {
    EXPECT_NE(prompt.find(std::string(to_string(c.code))), std::string::npos);
    EXPECT_NE(prompt.find(c.example), std::string::npos);
  }
  EXPECT_NE(prompt.find("NO_ISSUES"), std::string::npos);
  EXPECT_NE(prompt.find("SHk | "), std::string::npos);
}

TEST(Prompt, ListsSeeds) {
  const ReviewSuggestion seed{LintCode::SH2, {"a1", "a2"}, "merge them"};
  const std::string prompt = build_review_prompt(kDelivery, lint_categories(), {seed});
  EXPECT_NE(prompt.find("SH2 | a1,a2 | merge them"), std::string::npos);
}

TEST(Reply, Sentinel) {
  const auto m = parsed(kDelivery);
  for (const char* reply : {"NO_ISSUES", "  NO_ISSUES.\n", "`NO_ISSUES`", "The model looks fine.\n**NO_ISSUES**"}) {
    const auto r = parse_review_reply(reply, m);
    EXPECT_EQ(r.kind, ReviewReply::Kind::NoIssues) << reply;
    EXPECT_TRUE(r.suggestions.empty());
  }
}

TEST(Reply, Suggestions) {
  const auto m = parsed(kDelivery);
  const auto r = parse_review_reply(
      "Found two problems:\n"
      "1. SH4 | a2 | move the courier assignment into the home pickup branch\n"
      "- SH1 | a3, a1 | prepare the package before going to the mailing point\n",
      m);
  ASSERT_EQ(r.kind, ReviewReply::Kind::Suggestions);
  ASSERT_EQ(r.suggestions.size(), 2u);
  EXPECT_EQ(r.suggestions[0].category, LintCode::SH4);
  EXPECT_EQ(r.suggestions[0].targets, std::vector<std::string>{"a2"});
  EXPECT_EQ(r.suggestions[1].targets, (std::vector<std::string>{"a3", "a1"}));
  EXPECT_EQ(r.suggestions[1].proposal, "prepare the package before going to the mailing point");
}

TEST(Reply, SuggestionsWinOverSentinel) {
  const auto r = parse_review_reply("SH2 | a1 | drop it\nNO_ISSUES", parsed(kDelivery));
  EXPECT_EQ(r.kind, ReviewReply::Kind::Suggestions);
}

TEST(Reply, UnknownIdsDropped) {
  const auto r = parse_review_reply("SH2 | a9 | drop it\nSH3 | g1 | use a parallel gateway", parsed(kDelivery));
  ASSERT_EQ(r.kind, ReviewReply::Kind::Suggestions);
  ASSERT_EQ(r.suggestions.size(), 1u);
  EXPECT_EQ(r.suggestions[0].targets, std::vector<std::string>{"g1"});
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("a9"), std::string::npos);
}

TEST(Reply, Garbage) {
  const auto m = parsed(kDelivery);
  EXPECT_EQ(parse_review_reply("", m).kind, ReviewReply::Kind::ParseFailure);
  EXPECT_EQ(parse_review_reply("Looks good to me!", m).kind, ReviewReply::Kind::ParseFailure);
  EXPECT_EQ(parse_review_reply("SH9 | a1 | nope", m).kind, ReviewReply::Kind::ParseFailure);
}

TEST(Property, SurvivingSuggestionsNameKnownIds) {
  testing::ModelGenerator gen(4242, {.hostile_text = false});
  for (int i = 0; i < 200; ++i) {
    const auto m = gen.next();
    const auto ids = collect_ids(m);
    std::string reply;
    for (int k = 0; k < 5; ++k) {
      const bool real = gen.pick(0, 1) == 0;
      const std::string id = real ? ids[static_cast<std::size_t>(gen.pick(0, static_cast<int>(ids.size()) - 1))]
                                  : "zz" + std::to_string(k);
      reply += "SH" + std::to_string(gen.pick(1, 4)) + " | " + id + " | change it\n";
    }
    const auto r = parse_review_reply(reply, m);
    for (const auto& s : r.suggestions) {
      for (const auto& t : s.targets) EXPECT_NE(std::find(ids.begin(), ids.end(), t), ids.end());
    }
    EXPECT_EQ(r.suggestions.size() + r.warnings.size(), 5u);
  }
}

TEST(Format, RoundTripsThroughParser) {
  const auto m = parsed(kDelivery);
  const ReviewSuggestion s{LintCode::SH3, {"g1"}, "make it parallel"};
  const auto r = parse_review_reply(format_suggestion(s), m);
  ASSERT_EQ(r.suggestions.size(), 1u);
  EXPECT_EQ(r.suggestions[0], s);
}

}  // namespace
}  // namespace mao
