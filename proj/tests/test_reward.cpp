#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "bicot/errors.hpp"
#include "bicot/reward.hpp"
#include "support/fixtures.hpp"

using namespace bicot;

namespace {

ParseReport report_for(const std::string& text) {
  return parse_bicot(text).report;
}

const std::string kFullDoc =
    "<forward reasoning>f</forward reasoning>"
    "<reverse question>q</reverse question>"
    "<reverse reasoning>r</reverse reasoning>"
    "<final answer>a</final answer>";

}  // namespace

TEST_CASE("format reward counts well-formed pairs") {
  RewardConfig cfg;
  CHECK(format_reward(report_for(kFullDoc), cfg) == 1.0);
  CHECK(format_reward(report_for("<final answer>a</final answer>"), cfg) ==
        0.25);
  CHECK(format_reward(report_for("no tags"), cfg) == 0.0);
  // duplicated tag does not count
  CHECK(format_reward(
            report_for("<forward reasoning>f</forward reasoning>"
                       "<final answer>a</final answer>"
                       "<final answer>b</final answer>"),
            cfg) == 0.25);
  // out of order zeroes the whole component
  CHECK(format_reward(
            report_for("<final answer>a</final answer>"
                       "<forward reasoning>f</forward reasoning>"),
            cfg) == 0.0);
}

TEST_CASE("rouge reward weights the per-part scores") {
  RewardConfig cfg;
  const auto fx = bicot::testing::make_composition_fixture();
  const auto cand = parse_bicot(fx.high_completion).document;
  const auto [total, per_part] = rouge_reward(cand, fx.record.reference, cfg);
  CHECK(per_part.at(SegmentKind::ForwardReasoning) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(per_part.at(SegmentKind::FinalAnswer) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK(total == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("candidate missing a part scores 0 for it") {
  RewardConfig cfg;
  const auto fx = bicot::testing::make_composition_fixture();
  BiCotDocument cand;
  cand.segments[SegmentKind::ForwardReasoning] =
      std::string(fx.record.reference.segment_text(
          SegmentKind::ForwardReasoning));
  cand.raw_order = {SegmentKind::ForwardReasoning};
  const auto [total, per_part] = rouge_reward(cand, fx.record.reference, cfg);
  CHECK(total == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(per_part.at(SegmentKind::FinalAnswer) == 0.0);
}

TEST_CASE("keyword reward follows min(n * 0.25, 1.5)") {
  RewardConfig cfg;
  cfg.keyword_match_mode = KeywordMatchMode::Anywhere;
  for (int n = 0; n <= 10; ++n) {
    std::vector<std::string> keywords;
    std::string fa;
    for (int k = 0; k < 10; ++k) {
      keywords.push_back("kw" + std::to_string(k) + "z");
      if (k < n) fa += keywords.back() + " ";
    }
    const auto doc =
        parse_bicot("<final answer>" + fa + "</final answer>").document;
    const auto [score, matched] = keyword_reward(doc, keywords, cfg);
    CHECK(score ==
          doctest::Approx(std::min(0.25 * n, 1.5)).epsilon(1e-12));
    CHECK(matched.size() == std::size_t(n));
  }
}

TEST_CASE("default mode requires hits in both forward and final") {
  RewardConfig cfg;
  const std::vector<std::string> keywords = {"only-fw", "only-fa", "both"};
  const auto doc = parse_bicot(
                       "<forward reasoning>only-fw and both</forward "
                       "reasoning><final answer>only-fa and both</final "
                       "answer>")
                       .document;
  const auto [score, matched] = keyword_reward(doc, keywords, cfg);
  REQUIRE(matched.size() == 1);
  CHECK(matched[0] == "both");
  CHECK(score == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("compose is linear in the components") {
  RewardConfig cfg;
  CHECK(compose_reward(1.0, 0.501, 1.25, cfg) ==
        doctest::Approx(2.751).epsilon(1e-12));
  cfg.lambda_rouge = 2.0;
  cfg.lambda_keyword = 0.0;
  CHECK(compose_reward(1.0, 0.5, 9.0, cfg) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("composition fixture reaches its designed totals") {
  RewardConfig cfg;
  const auto fx = bicot::testing::make_composition_fixture();
  const auto high = score_completion(fx.high_completion, fx.record, cfg);
  CHECK(high.format == 1.0);
  CHECK(high.rouge == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(high.keyword == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(high.total == doctest::Approx(2.75).epsilon(1e-12));

  const auto low = score_completion(fx.low_completion, fx.record, cfg);
  CHECK(low.format == 1.0);
  CHECK(low.rouge == doctest::Approx(0.293).epsilon(1e-12));
  CHECK(low.keyword == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(low.total == doctest::Approx(1.793).epsilon(1e-12));
}

TEST_CASE("score_completion rejects invalid records") {
  RewardConfig cfg;
  QARecord bad;  // everything missing
  CHECK_THROWS_AS(score_completion(kFullDoc, bad, cfg), ValidationError);
}

TEST_CASE("scoring is deterministic") {
  RewardConfig cfg;
  const auto fx = bicot::testing::make_composition_fixture();
  const auto a = score_completion(fx.low_completion, fx.record, cfg);
  const auto b = score_completion(fx.low_completion, fx.record, cfg);
  CHECK(a.total == b.total);
  CHECK(a.per_part_rouge == b.per_part_rouge);
}

TEST_CASE("score_group preserves order and matches single scoring") {
  RewardConfig cfg;
  const auto fx = bicot::testing::make_composition_fixture();
  const auto group =
      score_group({fx.low_completion, fx.high_completion}, fx.record, cfg);
  REQUIRE(group.size() == 2);
  CHECK(group[0].total == doctest::Approx(1.793).epsilon(1e-12));
  CHECK(group[1].total == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("bank fixture totals are strictly ordered as designed") {
  RewardConfig cfg;
  const auto fx = bicot::testing::make_standard_bank();
  for (const auto& record : fx.dataset) {
    const auto& templates = fx.bank.templates.at(record.id);
    const auto scores = score_group(templates, record, cfg);
    REQUIRE(scores.size() == 8);
    // template 0 is the reference itself and strictly dominates
    for (std::size_t i = 1; i < scores.size(); ++i)
      REQUIRE(scores[0].total > scores[i].total);
    // exactly the first two templates are fully well-formed
    CHECK(scores[0].format == 1.0);
    CHECK(scores[1].format == 1.0);
    for (std::size_t i = 2; i < scores.size(); ++i)
      REQUIRE(scores[i].format < 1.0);
    // all totals distinct so the argmax is stable
    for (std::size_t i = 0; i < scores.size(); ++i)
      for (std::size_t j = i + 1; j < scores.size(); ++j)
        REQUIRE(scores[i].total != scores[j].total);
  }
}

TEST_CASE("adding a matched keyword never lowers the total") {
  RewardConfig cfg;
  cfg.keyword_match_mode = KeywordMatchMode::Anywhere;
  auto fx = bicot::testing::make_composition_fixture();
  const auto base = score_completion(fx.high_completion, fx.record, cfg);
  // "s1" appears in the high completion's final answer
  fx.record.expected_keywords.push_back("s1");
  const auto more = score_completion(fx.high_completion, fx.record, cfg);
  CHECK(more.total >= base.total);
}
