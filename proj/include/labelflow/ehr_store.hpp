#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "labelflow/dates.hpp"
#include "labelflow/error.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(MissingPath);
LABELFLOW_DEFINE_ERROR(MalformedDocument);
LABELFLOW_DEFINE_ERROR(DuplicatePatientId);
LABELFLOW_DEFINE_ERROR(UnknownPatient);
LABELFLOW_DEFINE_ERROR(FilterNotApplicable);

inline constexpr std::string_view kStoreFormatVersion = "ehr-store/1";

enum class Sex { male, female };
enum class RadiationType { proton, photon, electron };
enum class DocKind { clinical_note, radiology_report, pathology_report };
enum class NoteType { radiology, pathology, surgery, radiation_oncology, ent, urology, other };

std::string_view to_string(Sex v);
std::string_view to_string(RadiationType v);
std::string_view to_string(DocKind v);
std::string_view to_string(NoteType v);
std::optional<Sex> parse_sex(std::string_view text);
std::optional<RadiationType> parse_radiation_type(std::string_view text);
std::optional<DocKind> parse_doc_kind(std::string_view text);
std::optional<NoteType> parse_note_type(std::string_view text);

struct Demographics {
  std::string patient_id;
  std::string first_name;
  std::string last_name;
  Sex sex = Sex::female;
  std::string race;
  std::string ethnicity;
};

struct DeliveredPlan {
  std::string plan_id;
  RadiationType radiation_type = RadiationType::photon;
  Date delivered_date;
};

struct TreatmentCourse {
  std::string course_id;
  std::vector<std::string> icd_codes;  // set semantics; file order preserved
  std::vector<DeliveredPlan> delivered_plans;
  Date last_treatment_date;
};

struct Diagnosis {
  std::string icd_code;
  std::string description;
  Date onset_date;
};

struct ClinicalDocument {
  std::string doc_id;
  DocKind kind = DocKind::clinical_note;
  std::optional<NoteType> note_type;  // set iff kind == clinical_note
  DateTime timestamp;
  std::string provider;
  std::string department;
  std::string body;
};

struct Appointment {
  std::string appointment_id;
  DateTime timestamp;
  std::string provider;
  std::string department;
  std::string description;
};

struct InbasketMessage {
  std::string message_id;
  DateTime timestamp;
  std::string sender;
  std::string subject;
  std::string body;
};

struct PatientRecord {
  Demographics demographics;
  std::vector<TreatmentCourse> courses;
  std::vector<Diagnosis> diagnoses;
  std::vector<ClinicalDocument> documents;
  std::vector<Appointment> appointments;
  std::vector<InbasketMessage> inbasket_messages;
};

// Output of one retrieval. found == false iff records_count == 0, in which
// case the payload carries the explicit no-data statement.
struct FunctionResult {
  std::string payload;
  std::size_t records_count = 0;
  bool found = false;
};

enum class RetrievalKind {
  details,
  treatment_details,
  diagnosis_details,
  clinical_notes,
  radiology_reports,
  pathology_reports,
  appointments,
  inbasket_messages,
};

struct RetrievalFilter {
  std::optional<NoteType> note_type;
  std::optional<Date> date_minimum;  // inclusive, compared against start of day
};

// Serialization of the on-disk patient document ("ehr-store/1").
nlohmann::json to_json(const PatientRecord& record);

// Parses one patient document. Every problem found is appended to `problems`
// (prefixed by `locator`); the record is returned only when none were found.
std::optional<PatientRecord> parse_patient_record(const nlohmann::json& doc, const std::string& locator,
                                                  std::vector<std::string>& problems);

// Structural checks shared by the loader and in-memory construction.
void validate_record(const PatientRecord& record, const std::string& locator, std::vector<std::string>& problems);

void write_patient_file(const std::filesystem::path& dir, const PatientRecord& record);

// Immutable, file-backed patient store. Safe for concurrent readers.
class Store {
 public:
  Store() = default;

  // Loads every "*.json" file in `dir`. Throws MissingPath, MalformedDocument
  // (listing every offending document) or DuplicatePatientId.
  static Store load(const std::filesystem::path& dir);
  static Store from_records(std::vector<PatientRecord> records);

  std::size_t size() const { return patients_.size(); }
  bool contains(std::string_view patient_id) const;
  const PatientRecord& patient(std::string_view patient_id) const;
  std::vector<std::string> patient_ids() const;

  FunctionResult retrieve(std::string_view patient_id, RetrievalKind kind, const RetrievalFilter& filter = {}) const;

  // Appointments across all patients for one provider, newest first.
  FunctionResult physician_appointments(std::string_view provider, std::optional<Date> date_minimum = {}) const;

 private:
  std::map<std::string, PatientRecord, std::less<>> patients_;
};

// Header line every retrieval payload starts with.
inline constexpr std::string_view kRecordsCountHeader = "number of records count: ";
// Prefix of the separator line that opens each rendered record.
inline constexpr std::string_view kRecordSeparator = "--- record ";

}  // namespace labelflow
