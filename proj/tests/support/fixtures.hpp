#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "labelflow/ehr_store.hpp"

namespace labelflow::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "lf") {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline Date D(const char* text) { return *parse_date(text); }
inline DateTime DT(const char* text) { return *parse_datetime(text); }

inline ClinicalDocument note(std::string id, NoteType type, const char* ts, std::string body) {
  return {std::move(id), DocKind::clinical_note, type, DT(ts), "Dr. Adams", "Radiation Oncology", std::move(body)};
}

inline ClinicalDocument report(std::string id, DocKind kind, const char* ts, std::string body) {
  return {std::move(id), kind, std::nullopt, DT(ts), "Dr. Baker", "Radiology", std::move(body)};
}

// P0001: prostate patient with five clinical notes, three of them radiation
// oncology notes on or after 2018-03-01. P0002: no pathology reports.
inline PatientRecord fixture_p0001() {
  PatientRecord r;
  r.demographics = {"P0001", "Ann", "Lee", Sex::male, "White", "Not Hispanic or Latino"};
  r.courses.push_back({"2PROS",
                       {"C61", "C75.1"},
                       {{"PROS_1", RadiationType::photon, D("2017-11-02")}, {"PROS_2", RadiationType::photon, D("2017-12-20")}},
                       D("2017-12-20")});
  r.diagnoses.push_back({"C61", "Malignant neoplasm of prostate", D("2017-08-15")});
  r.documents.push_back(note("N1", NoteType::radiation_oncology, "2017-10-01T09:00:00", "Consult before treatment."));
  r.documents.push_back(note("N2", NoteType::radiation_oncology, "2018-03-01T00:00:00", "First follow-up."));
  r.documents.push_back(note("N3", NoteType::urology, "2018-06-10T10:30:00", "PSA 0.4 ng/mL."));
  r.documents.push_back(note("N4", NoteType::radiation_oncology, "2019-01-15T08:00:00", "Second follow-up."));
  r.documents.push_back(note("N5", NoteType::radiation_oncology, "2020-02-20T14:45:00", "Third follow-up."));
  r.documents.push_back(report("R1", DocKind::radiology_report, "2019-05-05T11:00:00", "No evidence of disease."));
  r.appointments.push_back({"A1", DT("2019-01-15T08:00:00"), "Dr. Adams", "Radiation Oncology", "Follow-up"});
  r.inbasket_messages.push_back({"M1", DT("2019-01-16T08:00:00"), "Ann Lee", "Question", "Is the PSA result in?"});
  return r;
}

inline PatientRecord fixture_p0002() {
  PatientRecord r;
  r.demographics = {"P0002", "Bo", "Kim", Sex::female, "Asian", "Not Hispanic or Latino"};
  r.courses.push_back({"HN1", {"C01"}, {{"HN1_1", RadiationType::proton, D("2016-04-01")}}, D("2016-04-01")});
  r.diagnoses.push_back({"C01", "Malignant neoplasm of base of tongue", D("2016-01-10")});
  r.documents.push_back(note("N1", NoteType::ent, "2016-09-01T09:00:00", "Oral mucosa intact without bone exposure."));
  return r;
}

inline Store fixture_store() { return Store::from_records({fixture_p0001(), fixture_p0002()}); }

// Doc ids in the order they appear in a retrieval payload.
inline std::vector<std::string> payload_doc_ids(const std::string& payload, const std::string& key = "doc_id: ") {
  std::vector<std::string> ids;
  std::istringstream in(payload);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind(key, 0) == 0) ids.push_back(line.substr(key.size()));
  }
  return ids;
}

}  // namespace labelflow::testing
