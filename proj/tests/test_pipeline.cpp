#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <string>

#include "bicot/cot_document.hpp"
#include "bicot/errors.hpp"
#include "bicot/jsonl.hpp"
#include "bicot/pipeline.hpp"
#include "support/fixtures.hpp"

using namespace bicot;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("bicot_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

BiCotDocument two_segment_doc(const std::string& fw, const std::string& fa) {
  BiCotDocument doc;
  doc.segments[SegmentKind::ForwardReasoning] = fw;
  doc.segments[SegmentKind::FinalAnswer] = fa;
  doc.raw_order = {SegmentKind::ForwardReasoning, SegmentKind::FinalAnswer};
  return doc;
}

// Seeds the replay directory with well-formed responses for all three
// stages of one question/answer pair.
void seed_happy_fixtures(const std::string& dir, const std::string& question,
                         const std::string& answer) {
  const auto prompts = build_prompts(question, answer);
  FixtureTeacherClient::store_fixture(
      dir, prompts.system, prompts.forward_prompt,
      "<forward reasoning>皮影戏起源于西汉时期，是一种古老工艺。"
      "</forward reasoning>");
  FixtureTeacherClient::store_fixture(
      dir, prompts.system, prompts.reverse_question_prompt,
      "<reverse question>哪种戏剧起源于西汉时期？</reverse question>");
  FixtureTeacherClient::store_fixture(
      dir, prompts.system,
      prompts.reverse_reasoning_prompt +
          "\n\nReverse question: 哪种戏剧起源于西汉时期？",
      "<reverse reasoning>西汉时期的记载表明皮影戏已经出现。"
      "</reverse reasoning>");
}

const std::string kQuestion = "皮影戏起源于哪个朝代？";
const std::string kAnswer = "皮影戏起源于西汉时期。";

}  // namespace

TEST_CASE("prompts carry the tag instructions and the worked example") {
  const auto p = build_prompts("Q?", "A.");
  CHECK(p.forward_prompt.find("<forward reasoning></forward reasoning>") !=
        std::string::npos);
  CHECK(p.reverse_question_prompt.find(
            "<reverse question></reverse question>") != std::string::npos);
  CHECK(p.reverse_reasoning_prompt.find(
            "<reverse reasoning></reverse reasoning>") != std::string::npos);
  CHECK(p.reverse_question_prompt.find("Xie inkstones") != std::string::npos);
  CHECK(p.reverse_question_prompt.find("Crown of Stones") !=
        std::string::npos);
  for (const auto* prompt :
       {&p.forward_prompt, &p.reverse_question_prompt,
        &p.reverse_reasoning_prompt}) {
    CHECK(prompt->find("Question: Q?") != std::string::npos);
    CHECK(prompt->find("Answer: A.") != std::string::npos);
  }
  CHECK_THROWS_AS(build_prompts("", "A."), ValidationError);
  CHECK_THROWS_AS(build_prompts("Q?", ""), ValidationError);
}

TEST_CASE("request keys are deterministic and prompt-sensitive") {
  const auto k1 = FixtureTeacherClient::request_key("sys", "prompt");
  const auto k2 = FixtureTeacherClient::request_key("sys", "prompt");
  const auto k3 = FixtureTeacherClient::request_key("sys", "prompt!");
  CHECK(k1 == k2);
  CHECK(k1 != k3);
  CHECK(k1.size() == 16);
}

TEST_CASE("fixture replay augments a record end to end") {
  const auto dir = fresh_dir("happy");
  seed_happy_fixtures(dir, kQuestion, kAnswer);
  FixtureTeacherClient client(dir);
  const auto outcome = augment_record("aug-1", kQuestion, kAnswer, client);
  REQUIRE(outcome.accepted());
  CHECK(outcome.attempts == 3);
  CHECK(outcome.defects.empty());
  CHECK(outcome.needs_review);
  const auto& record = *outcome.record;
  CHECK(record.id == "aug-1");
  // the gold answer is kept verbatim as the final answer
  CHECK(record.reference.segment_text(SegmentKind::FinalAnswer) == kAnswer);
  REQUIRE_FALSE(record.expected_keywords.empty());
  CHECK(record.expected_keywords[0] == "皮影戏起源于西汉时期");
  CHECK(validate_record(record).empty());
}

TEST_CASE("replay is byte-deterministic across runs") {
  const auto dir = fresh_dir("determinism");
  seed_happy_fixtures(dir, kQuestion, kAnswer);
  FixtureTeacherClient client(dir);
  const auto a = augment_record("aug-1", kQuestion, kAnswer, client);
  const auto b = augment_record("aug-1", kQuestion, kAnswer, client);
  REQUIRE(a.accepted());
  REQUIRE(b.accepted());
  CHECK(record_to_json(*a.record).dump() == record_to_json(*b.record).dump());
}

TEST_CASE("a stage that never produces its tag rejects the record") {
  const auto dir = fresh_dir("stage2_bad");
  const auto prompts = build_prompts(kQuestion, kAnswer);
  FixtureTeacherClient::store_fixture(
      dir, prompts.system, prompts.forward_prompt,
      "<forward reasoning>ok</forward reasoning>");
  FixtureTeacherClient::store_fixture(dir, prompts.system,
                                      prompts.reverse_question_prompt,
                                      "no tags in this response");
  FixtureTeacherClient client(dir);
  const auto outcome =
      augment_record("aug-2", kQuestion, kAnswer, client, /*max_retries=*/2);
  CHECK_FALSE(outcome.accepted());
  // 1 forward call + 3 reverse-question tries, then give up
  CHECK(outcome.attempts == 4);
  REQUIRE(outcome.defects.size() == 3);
  CHECK(outcome.defects[0].find("reverse question") != std::string::npos);
}

TEST_CASE("missing fixture surfaces as an io error") {
  const auto dir = fresh_dir("missing");
  FixtureTeacherClient client(dir);
  CHECK_THROWS_AS(client.send("sys", "never recorded"), IoError);
}

TEST_CASE("keyword extraction on identical CJK segments") {
  const auto doc = two_segment_doc("西汉皮影", "西汉皮影");
  const auto keywords = extract_keywords(doc);
  REQUIRE(keywords.size() == 1);
  CHECK(keywords[0] == "西汉皮影");
}

TEST_CASE("keyword extraction on disjoint segments is empty") {
  CHECK(extract_keywords(two_segment_doc("甲乙丙丁", "戊己庚辛")).empty());
  CHECK(extract_keywords(
            two_segment_doc("alpha beta", "gamma delta"))
            .empty());
}

TEST_CASE("keyword extraction keeps maximal runs, longest first") {
  const auto doc = two_segment_doc("the origin of shadow puppetry craft",
                                   "shadow puppetry has its origin here");
  const auto keywords = extract_keywords(doc);
  REQUIRE(keywords.size() == 2);
  CHECK(keywords[0] == "shadow puppetry");
  CHECK(keywords[1] == "origin");
}

TEST_CASE("stoplist entries are dropped") {
  const auto doc = two_segment_doc("the craft", "the craft");
  const auto keywords = extract_keywords(doc);
  REQUIRE(keywords.size() == 1);
  // "the craft" survives as a 2-gram; the bare stopword would not
  CHECK(keywords[0] == "the craft");
  const auto only_stop = extract_keywords(two_segment_doc("the", "the"));
  CHECK(only_stop.empty());
}

TEST_CASE("joined n-grams that are not substrings of both are dropped") {
  // "汉皮" spans the space in one segment, so matching it later would fail
  const auto doc = two_segment_doc("西汉 皮影", "西汉皮影");
  for (const auto& kw : extract_keywords(doc)) {
    CHECK(std::string("西汉 皮影").find(kw) != std::string::npos);
    CHECK(std::string("西汉皮影").find(kw) != std::string::npos);
  }
}

TEST_CASE("keyword count is capped") {
  std::string fw, fa;
  for (int i = 0; i < 12; ++i) {
    const std::string w = "word" + std::to_string(i);
    fw += w + " filler" + std::to_string(i) + "x ";
    fa += w + " pad" + std::to_string(i) + "y ";
  }
  const auto keywords = extract_keywords(two_segment_doc(fw, fa));
  CHECK(keywords.size() == 8);
}

TEST_CASE("extraction without both segments throws") {
  BiCotDocument doc;
  doc.segments[SegmentKind::FinalAnswer] = "x";
  doc.raw_order = {SegmentKind::FinalAnswer};
  CHECK_THROWS_AS(extract_keywords(doc), ValidationError);
}

TEST_CASE("dataset validation accepts a clean file") {
  const auto dir = fresh_dir("validate_ok");
  const auto path = dir + "/data.jsonl";
  save_dataset(path, bicot::testing::make_synthetic_dataset(5));
  const auto report = validate_dataset(path);
  CHECK(report.ok());
  CHECK(report.record_count == 5);
}

TEST_CASE("dataset validation flags duplicates and truncation") {
  const auto dir = fresh_dir("validate_bad");
  const auto path = dir + "/data.jsonl";
  auto records = bicot::testing::make_synthetic_dataset(2);
  records[1].id = records[0].id;
  save_dataset(path, records);
  // chop the trailing newline to simulate a truncated write
  auto content = read_file(path);
  content.pop_back();
  write_file(path, content);
  const auto report = validate_dataset(path);
  REQUIRE(report.violations.size() == 2);
  CHECK(report.violations[0].find("trailing newline") != std::string::npos);
  CHECK(report.violations[1].find("duplicate id") != std::string::npos);
}

TEST_CASE("dataset validation flags bad JSON and bad UTF-8") {
  const auto dir = fresh_dir("validate_ugly");
  const auto path = dir + "/data.jsonl";
  std::string content;
  content += "{not json\n";
  content += "\"\xff\xfe\"\n";
  write_file(path, content);
  const auto report = validate_dataset(path);
  CHECK(report.record_count == 0);
  REQUIRE(report.violations.size() == 2);
  CHECK(report.violations[0].find("bad JSON") != std::string::npos);
  CHECK(report.violations[1].find("UTF-8") != std::string::npos);
}

TEST_CASE("dataset validation throws on an unreadable path") {
  CHECK_THROWS_AS(validate_dataset("/nonexistent/nowhere.jsonl"), IoError);
}
