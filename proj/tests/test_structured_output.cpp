#include <gtest/gtest.h>

#include "labelflow/structured_output.hpp"
#include "support/output_corpus.hpp"

using namespace labelflow;
using namespace labelflow::testing;
using nlohmann::json;

TEST(Extract, FencedRecurrenceObject) {
  json j = extract_structured("## Answer\n```json\n{\"recurrence\": \"yes\"}\n```");
  EXPECT_EQ(j["recurrence"], "yes");
}

TEST(Extract, SingleQuotedOrnObject) {
  json j = extract_structured("```\n{'stage': '2', 'total number of records': '37'}\n```");
  EXPECT_EQ(j["stage"], "2");
  EXPECT_EQ(j["total number of records"], "37");
  auto label = std::get<OrnLabel>(validate_output(j, TaskName::orn));
  EXPECT_EQ(label.stage, 2);
  EXPECT_EQ(label.total_records, 37);
}

TEST(Extract, ProseWithoutBracesHasNoStructuredOutput) {
  EXPECT_THROW(extract_structured("No recurrence was found."), NoStructuredOutput);
}

TEST(Extract, LastFencedBlockWins) {
  json j = extract_structured("```\n{\"recurrence\": \"no\"}\n```\nthen\n```json\n{\"recurrence\": \"yes\"}\n```");
  EXPECT_EQ(j["recurrence"], "yes");
}

TEST(Extract, BraceGroupWithoutFenceIsStrict) {
  EXPECT_EQ(extract_structured("The answer is {\"recurrence\": \"no\"} overall.")["recurrence"], "no");
  EXPECT_THROW(extract_structured("The answer is {'recurrence': 'no'}."), UnparsableBlock);
}

TEST(Extract, BracesInsideStringsDoNotConfuseGrouping) {
  json j = extract_structured("x {\"note\": \"a } b\", \"recurrence\": \"no\"} y");
  EXPECT_EQ(j["recurrence"], "no");
}

TEST(Extract, DoubledBracesUnwrapInsideFence) {
  EXPECT_EQ(extract_structured("```json\n{{\n  \"recurrence\": \"No\"\n}}\n```")["recurrence"], "No");
}

TEST(Extract, ApostropheInsideSingleQuotedValue) {
  json j = extract_structured("```\n{'note': 'patient\\'s bone', 'say': 'he said \"hi\"'}\n```");
  EXPECT_EQ(j["note"], "patient's bone");
  EXPECT_EQ(j["say"], "he said \"hi\"");
}

TEST(Validate, OrnStageThreeIsPositiveStage) {
  auto label = std::get<OrnLabel>(validate_output({{"stage", "3"}, {"total number of records", "12"}}, TaskName::orn));
  EXPECT_EQ(label.stage, 3);
}

TEST(Validate, RecurrenceCaseFolded) {
  EXPECT_FALSE(std::get<RecurrenceLabel>(validate_output({{"recurrence", "No"}}, TaskName::recurrence)).recurrence);
  EXPECT_TRUE(std::get<RecurrenceLabel>(validate_output({{"recurrence", " YES "}}, TaskName::recurrence)).recurrence);
}

TEST(Validate, OrnStageFourIsSchemaViolation) {
  EXPECT_THROW(validate_output({{"stage", "4"}, {"total number of records", "1"}}, TaskName::orn), SchemaViolation);
}

TEST(Validate, OrnAcceptsTotalRecordsAlias) {
  EXPECT_NO_THROW(validate_output({{"stage", 0}, {"total_records", 5}}, TaskName::orn));
}

TEST(Validate, ViolationNamesTheField) {
  try {
    validate_output({{"stage", "1"}}, TaskName::orn);
    FAIL();
  } catch (const SchemaViolation& e) {
    EXPECT_NE(std::string(e.what()).find("total_records"), std::string::npos) << e.what();
  }
}

TEST(Validate, NonObjectRejected) { EXPECT_THROW(validate_output(json::array(), TaskName::orn), SchemaViolation); }

TEST(Validate, Tier1CourseFields) {
  auto label = std::get<Tier1Label>(validate_output(extract_structured(kTier1Answer), TaskName::tier1_qa));
  ASSERT_EQ(label.delivered_courses.size(), 2u);
  EXPECT_EQ(label.delivered_courses[0].course_id, "2PROS");
  EXPECT_EQ(label.delivered_courses[0].icd_codes, (std::vector<std::string>{"C61", "C75.1"}));
  EXPECT_EQ(courses_from_json(courses_to_json(label.delivered_courses))[1].delivered_plan_ids,
            (std::vector<std::string>{"SBRT_1"}));
}

TEST(Corpus, AnswerFormatsParse) {
  for (const auto& c : format_cases()) EXPECT_EQ(classify(c), Expect::ok) << c.name;
}

TEST(Corpus, MutationsProduceSpecifiedOutcomes) {
  const auto cases = mutation_cases();
  ASSERT_EQ(cases.size(), 20u);
  for (const auto& c : cases) EXPECT_STREQ(to_string(classify(c)), to_string(c.expect)) << c.name;
}

TEST(TaskNames, RoundTrip) {
  for (auto t : {TaskName::tier1_qa, TaskName::orn, TaskName::recurrence}) EXPECT_EQ(parse_task_name(to_string(t)), t);
  EXPECT_FALSE(parse_task_name("orn2"));
}
