#include <gtest/gtest.h>

#include "labelflow/ehr_store.hpp"
#include "support/fixtures.hpp"
#include "support/retrieval_oracle.hpp"

using namespace labelflow;
using namespace labelflow::testing;

namespace {

void write_fixture_dir(const std::filesystem::path& dir) {
  write_patient_file(dir, fixture_p0001());
  write_patient_file(dir, fixture_p0002());
}

}  // namespace

TEST(StoreLoad, DirectoryWithTwoPatients) {
  TempDir dir;
  write_fixture_dir(dir.path());
  Store store = Store::load(dir.path());
  EXPECT_EQ(store.size(), 2u);
  EXPECT_TRUE(store.contains("P0001"));
  EXPECT_EQ(store.patient_ids(), (std::vector<std::string>{"P0001", "P0002"}));
}

TEST(StoreLoad, MissingTimestampNamesTheDocument) {
  TempDir dir;
  auto doc = to_json(fixture_p0001());
  doc["documents"][2].erase("timestamp");
  spit(dir / "P0001.json", doc.dump(2));
  try {
    Store::load(dir.path());
    FAIL() << "expected MalformedDocument";
  } catch (const MalformedDocument& e) {
    EXPECT_NE(std::string(e.what()).find("N3"), std::string::npos) << e.what();
  }
}

TEST(StoreLoad, ListsEveryOffendingDocument) {
  TempDir dir;
  auto a = to_json(fixture_p0001());
  a["documents"][0].erase("timestamp");
  auto b = to_json(fixture_p0002());
  b["courses"][0]["delivered_plans"] = nlohmann::json::array();
  spit(dir / "P0001.json", a.dump());
  spit(dir / "P0002.json", b.dump());
  try {
    Store::load(dir.path());
    FAIL() << "expected MalformedDocument";
  } catch (const MalformedDocument& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("P0001"), std::string::npos) << what;
    EXPECT_NE(what.find("P0002"), std::string::npos) << what;
  }
}

TEST(StoreLoad, MissingPath) {
  EXPECT_THROW(Store::load("/nonexistent/store/dir"), MissingPath);
}

TEST(StoreLoad, DuplicatePatientId) {
  TempDir dir;
  write_patient_file(dir.path(), fixture_p0001());
  spit(dir / "copy.json", to_json(fixture_p0001()).dump());
  EXPECT_THROW(Store::load(dir.path()), DuplicatePatientId);
}

TEST(StoreLoad, RejectsUnknownVersion) {
  TempDir dir;
  auto doc = to_json(fixture_p0001());
  doc["version"] = "ehr-store/9";
  spit(dir / "P0001.json", doc.dump());
  EXPECT_THROW(Store::load(dir.path()), MalformedDocument);
}

TEST(StoreLoad, NoteTypeOnReportIsMalformed) {
  TempDir dir;
  auto doc = to_json(fixture_p0001());
  doc["documents"][5]["note_type"] = "radiology";
  spit(dir / "P0001.json", doc.dump());
  EXPECT_THROW(Store::load(dir.path()), MalformedDocument);
}

TEST(StoreLoad, LastTreatmentDateMustBeLatestPlan) {
  auto r = fixture_p0001();
  r.courses[0].last_treatment_date = D("2017-12-01");
  std::vector<std::string> problems;
  validate_record(r, "P0001", problems);
  EXPECT_FALSE(problems.empty());
}

TEST(StoreLoad, DeterministicAcrossLoads) {
  TempDir dir;
  write_fixture_dir(dir.path());
  Store a = Store::load(dir.path());
  Store b = Store::load(dir.path());
  for (const auto& id : a.patient_ids()) EXPECT_EQ(to_json(a.patient(id)), to_json(b.patient(id)));
}

TEST(StoreLoad, JsonRoundTrip) {
  std::vector<std::string> problems;
  auto back = parse_patient_record(to_json(fixture_p0001()), "P0001", problems);
  ASSERT_TRUE(back) << (problems.empty() ? "" : problems.front());
  EXPECT_EQ(to_json(*back), to_json(fixture_p0001()));
}

TEST(Retrieve, NotesByTypeSinceDateNewestFirst) {
  Store store = fixture_store();
  RetrievalFilter f{NoteType::radiation_oncology, D("2018-03-01")};
  FunctionResult r = store.retrieve("P0001", RetrievalKind::clinical_notes, f);
  EXPECT_EQ(r.records_count, 3u);
  EXPECT_TRUE(r.found);
  EXPECT_EQ(payload_doc_ids(r.payload), (std::vector<std::string>{"N5", "N4", "N2"}));
  EXPECT_EQ(r.payload.rfind(std::string("Clinical notes for patient P0001\n") + std::string(kRecordsCountHeader) + "3\n", 0),
            0u);
}

TEST(Retrieve, NoDataStatement) {
  Store store = fixture_store();
  FunctionResult r = store.retrieve("P0002", RetrievalKind::pathology_reports);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.records_count, 0u);
  EXPECT_NE(r.payload.find("No pathology reports could be found for patient P0002"), std::string::npos);
  EXPECT_NE(r.payload.find("number of records count: 0"), std::string::npos);
}

TEST(Retrieve, UnknownPatient) {
  Store store;
  EXPECT_THROW(store.retrieve("P_missing", RetrievalKind::details), UnknownPatient);
}

TEST(Retrieve, NoteTypeOnlyForClinicalNotes) {
  Store store = fixture_store();
  EXPECT_THROW(store.retrieve("P0001", RetrievalKind::radiology_reports, {NoteType::radiology, std::nullopt}),
               FilterNotApplicable);
}

TEST(Retrieve, DateMinimumRejectedForStructuredKinds) {
  Store store = fixture_store();
  EXPECT_THROW(store.retrieve("P0001", RetrievalKind::treatment_details, {std::nullopt, D("2018-01-01")}),
               FilterNotApplicable);
}

TEST(Retrieve, DetailsListSixDemographicFields) {
  Store store = fixture_store();
  FunctionResult r = store.retrieve("P0001", RetrievalKind::details);
  EXPECT_EQ(r.records_count, 1u);
  for (const char* field : {"patient_id: P0001", "first_name: Ann", "last_name: Lee", "sex: male", "race: White",
                            "ethnicity: Not Hispanic or Latino"}) {
    EXPECT_NE(r.payload.find(field), std::string::npos) << field;
  }
}

TEST(Retrieve, TreatmentDetailsRenderCoursesAndPlans) {
  Store store = fixture_store();
  FunctionResult r = store.retrieve("P0001", RetrievalKind::treatment_details);
  EXPECT_EQ(r.records_count, 1u);
  EXPECT_NE(r.payload.find("course_id: 2PROS"), std::string::npos);
  EXPECT_LT(r.payload.find("PROS_2"), r.payload.find("PROS_1"));
}

TEST(Retrieve, AppointmentsAndInbasket) {
  Store store = fixture_store();
  EXPECT_EQ(store.retrieve("P0001", RetrievalKind::appointments).records_count, 1u);
  EXPECT_EQ(store.retrieve("P0001", RetrievalKind::inbasket_messages).records_count, 1u);
  EXPECT_EQ(store.retrieve("P0002", RetrievalKind::appointments).records_count, 0u);
  EXPECT_EQ(store.physician_appointments("Dr. Adams").records_count, 1u);
  EXPECT_EQ(store.physician_appointments("Dr. Adams", D("2020-01-01")).records_count, 0u);
}

TEST(RetrieveProperty, MatchesBruteForceOracle) {
  RetrievalCheck check = check_retrieval_ordering(20240501, 500);
  EXPECT_EQ(check.calls, 500);
  EXPECT_EQ(check.mismatches, 0) << check.first_failure;
}

TEST(RetrieveProperty, DateMinimumIsSubsetOfUnfiltered) {
  std::mt19937_64 rng(11);
  auto records = random_records(rng, 6, 25);
  for (auto& r : records) {
    for (std::size_t i = 0; i < r.documents.size(); ++i) r.documents[i].doc_id += "_" + std::to_string(i);
  }
  Store store = Store::from_records(records);
  for (const auto& r : records) {
    const std::string& id = r.demographics.patient_id;
    auto all = payload_doc_ids(store.retrieve(id, RetrievalKind::clinical_notes).payload);
    for (int day = 0; day < 42; day += 5) {
      const Date min = D("2015-01-01") + std::chrono::days(day);
      auto some = payload_doc_ids(store.retrieve(id, RetrievalKind::clinical_notes, {std::nullopt, min}).payload);
      std::vector<std::string> expected;
      for (const auto& doc_id : all) {
        for (const auto& d : r.documents) {
          if (d.doc_id == doc_id && d.timestamp >= start_of(min)) expected.push_back(doc_id);
        }
      }
      EXPECT_EQ(some, expected);
    }
  }
}

TEST(RetrieveProperty, RecordsCountEqualsBodiesInPayload) {
  std::mt19937_64 rng(5);
  auto records = random_records(rng, 4, 20);
  for (auto& r : records) {
    for (std::size_t i = 0; i < r.documents.size(); ++i) r.documents[i].doc_id += "_" + std::to_string(i);
  }
  Store store = Store::from_records(records);
  for (const auto& r : records) {
    for (auto kind : {RetrievalKind::clinical_notes, RetrievalKind::radiology_reports, RetrievalKind::pathology_reports}) {
      FunctionResult res = store.retrieve(r.demographics.patient_id, kind);
      EXPECT_EQ(payload_doc_ids(res.payload, "body:").size(), res.records_count);
      EXPECT_EQ(res.found, res.records_count > 0);
    }
  }
}
