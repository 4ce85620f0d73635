#include "labelflow/ehr_store.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace labelflow {

using nlohmann::json;

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N>& table, std::string_view text) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum v) {
  for (const auto& [value, name] : table) {
    if (value == v) return name;
  }
  return "unknown";
}

constexpr std::array<std::pair<Sex, std::string_view>, 2> kSexNames{{{Sex::male, "male"}, {Sex::female, "female"}}};
constexpr std::array<std::pair<RadiationType, std::string_view>, 3> kRadiationNames{
    {{RadiationType::proton, "proton"}, {RadiationType::photon, "photon"}, {RadiationType::electron, "electron"}}};
constexpr std::array<std::pair<DocKind, std::string_view>, 3> kDocKindNames{{{DocKind::clinical_note, "clinical_note"},
                                                                             {DocKind::radiology_report, "radiology_report"},
                                                                             {DocKind::pathology_report, "pathology_report"}}};
constexpr std::array<std::pair<NoteType, std::string_view>, 7> kNoteTypeNames{{{NoteType::radiology, "radiology"},
                                                                               {NoteType::pathology, "pathology"},
                                                                               {NoteType::surgery, "surgery"},
                                                                               {NoteType::radiation_oncology, "radiation_oncology"},
                                                                               {NoteType::ent, "ent"},
                                                                               {NoteType::urology, "urology"},
                                                                               {NoteType::other, "other"}}};

// Field readers that report problems instead of throwing, so one pass over a
// document can enumerate everything wrong with it.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string where, std::vector<std::string>& problems)
      : obj_(obj), where_(std::move(where)), problems_(problems) {
    if (!obj_.is_object()) fail("", "expected an object");
  }

  std::string str(const char* key) {
    if (!obj_.is_object()) return {};
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      fail(key, "missing");
      return {};
    }
    if (!it->is_string()) {
      fail(key, "expected a string");
      return {};
    }
    return it->get<std::string>();
  }

  std::optional<std::string> optional_str(const char* key) {
    if (!obj_.is_object() || !obj_.contains(key) || obj_.at(key).is_null()) return std::nullopt;
    return str(key);
  }

  Date date(const char* key) {
    const auto before = problems_.size();
    auto text = str(key);
    if (problems_.size() != before) return {};
    auto d = parse_date(text);
    if (!d) fail(key, "not a YYYY-MM-DD date: '" + text + "'");
    return d.value_or(Date{});
  }

  DateTime datetime(const char* key) {
    const auto before = problems_.size();
    auto text = str(key);
    if (problems_.size() != before) return {};
    auto t = parse_datetime(text);
    if (!t) fail(key, "not a YYYY-MM-DDTHH:MM:SS timestamp: '" + text + "'");
    return t.value_or(DateTime{});
  }

  const json* array(const char* key, bool required) {
    if (!obj_.is_object()) return nullptr;
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) fail(key, "missing");
      return nullptr;
    }
    if (!it->is_array()) {
      fail(key, "expected an array");
      return nullptr;
    }
    return &*it;
  }

  void fail(std::string_view key, const std::string& reason) {
    std::string msg = where_;
    if (!key.empty()) msg += std::string(".") + std::string(key);
    problems_.push_back(msg + ": " + reason);
  }

 private:
  const json& obj_;
  std::string where_;
  std::vector<std::string>& problems_;
};

std::string id_or_index(const json& item, const char* key, std::size_t index) {
  if (item.is_object() && item.contains(key) && item.at(key).is_string()) {
    return item.at(key).get<std::string>();
  }
  return "#" + std::to_string(index);
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

struct Section {
  std::ostringstream body;
  std::size_t count = 0;
};

std::string finish_payload(std::string_view title, std::string_view patient_id, std::string_view what,
                           const Section& section) {
  std::ostringstream out;
  out << title << " for patient " << patient_id << "\n";
  out << kRecordsCountHeader << section.count << "\n";
  if (section.count == 0) {
    out << "No " << what << " could be found for patient " << patient_id << " with the given inputs.\n";
  } else {
    out << section.body.str();
  }
  return out.str();
}

void open_record(Section& s, std::size_t total) {
  ++s.count;
  s.body << "\n" << kRecordSeparator << s.count << " of " << total << " ---\n";
}

template <typename T, typename Key>
void sort_newest_first(std::vector<const T*>& items, Key key) {
  std::sort(items.begin(), items.end(), [&](const T* a, const T* b) {
    auto ka = key(*a);
    auto kb = key(*b);
    return ka > kb;
  });
}

}  // namespace

std::string_view to_string(Sex v) { return name_of(kSexNames, v); }
std::string_view to_string(RadiationType v) { return name_of(kRadiationNames, v); }
std::string_view to_string(DocKind v) { return name_of(kDocKindNames, v); }
std::string_view to_string(NoteType v) { return name_of(kNoteTypeNames, v); }
std::optional<Sex> parse_sex(std::string_view text) { return lookup(kSexNames, text); }
std::optional<RadiationType> parse_radiation_type(std::string_view text) { return lookup(kRadiationNames, text); }
std::optional<DocKind> parse_doc_kind(std::string_view text) { return lookup(kDocKindNames, text); }
std::optional<NoteType> parse_note_type(std::string_view text) { return lookup(kNoteTypeNames, text); }

json to_json(const PatientRecord& r) {
  json doc;
  doc["version"] = kStoreFormatVersion;
  const auto& d = r.demographics;
  doc["demographics"] = {{"patient_id", d.patient_id}, {"first_name", d.first_name}, {"last_name", d.last_name},
                         {"sex", to_string(d.sex)},    {"race", d.race},             {"ethnicity", d.ethnicity}};
  doc["courses"] = json::array();
  for (const auto& c : r.courses) {
    json plans = json::array();
    for (const auto& p : c.delivered_plans) {
      plans.push_back({{"plan_id", p.plan_id},
                       {"radiation_type", to_string(p.radiation_type)},
                       {"delivered_date", format_date(p.delivered_date)}});
    }
    doc["courses"].push_back({{"course_id", c.course_id},
                              {"icd_codes", c.icd_codes},
                              {"delivered_plans", plans},
                              {"last_treatment_date", format_date(c.last_treatment_date)}});
  }
  doc["diagnoses"] = json::array();
  for (const auto& dx : r.diagnoses) {
    doc["diagnoses"].push_back(
        {{"icd_code", dx.icd_code}, {"description", dx.description}, {"onset_date", format_date(dx.onset_date)}});
  }
  doc["documents"] = json::array();
  for (const auto& doc_item : r.documents) {
    json j{{"doc_id", doc_item.doc_id},
           {"doc_kind", to_string(doc_item.kind)},
           {"timestamp", format_datetime(doc_item.timestamp)},
           {"provider", doc_item.provider},
           {"department", doc_item.department},
           {"body", doc_item.body}};
    if (doc_item.note_type) j["note_type"] = to_string(*doc_item.note_type);
    doc["documents"].push_back(std::move(j));
  }
  doc["appointments"] = json::array();
  for (const auto& a : r.appointments) {
    doc["appointments"].push_back({{"appointment_id", a.appointment_id},
                                   {"timestamp", format_datetime(a.timestamp)},
                                   {"provider", a.provider},
                                   {"department", a.department},
                                   {"description", a.description}});
  }
  doc["inbasket_messages"] = json::array();
  for (const auto& m : r.inbasket_messages) {
    doc["inbasket_messages"].push_back({{"message_id", m.message_id},
                                        {"timestamp", format_datetime(m.timestamp)},
                                        {"sender", m.sender},
                                        {"subject", m.subject},
                                        {"body", m.body}});
  }
  return doc;
}

void validate_record(const PatientRecord& r, const std::string& locator, std::vector<std::string>& problems) {
  if (r.demographics.patient_id.empty()) problems.push_back(locator + ": demographics.patient_id is empty");
  std::set<std::string> course_ids;
  for (const auto& c : r.courses) {
    std::string where = locator + ": course " + c.course_id;
    if (!course_ids.insert(c.course_id).second) problems.push_back(where + ": duplicate course_id");
    if (c.delivered_plans.empty()) {
      problems.push_back(where + ": delivered_plans is empty");
      continue;
    }
    auto latest = std::max_element(c.delivered_plans.begin(), c.delivered_plans.end(),
                                   [](const auto& a, const auto& b) { return a.delivered_date < b.delivered_date; });
    if (latest->delivered_date != c.last_treatment_date) {
      problems.push_back(where + ": last_treatment_date " + format_date(c.last_treatment_date) +
                         " differs from latest delivered_date " + format_date(latest->delivered_date));
    }
  }
  for (const auto& dx : r.diagnoses) {
    if (dx.icd_code.empty()) problems.push_back(locator + ": diagnosis with empty icd_code");
  }
  std::set<std::string> doc_ids;
  for (const auto& d : r.documents) {
    std::string where = locator + ": document " + d.doc_id;
    if (!doc_ids.insert(d.doc_id).second) problems.push_back(where + ": duplicate doc_id");
    bool is_note = d.kind == DocKind::clinical_note;
    if (is_note && !d.note_type) problems.push_back(where + ": clinical_note without note_type");
    if (!is_note && d.note_type) problems.push_back(where + ": note_type set on " + std::string(to_string(d.kind)));
  }
}

std::optional<PatientRecord> parse_patient_record(const json& doc, const std::string& locator,
                                                  std::vector<std::string>& problems) {
  const std::size_t problems_before = problems.size();
  PatientRecord r;
  FieldReader top(doc, locator, problems);
  if (!doc.is_object()) return std::nullopt;

  auto version = top.str("version");
  if (!version.empty() && version != kStoreFormatVersion) {
    top.fail("version", "unsupported version '" + version + "'");
  }

  if (!doc.contains("demographics")) {
    top.fail("demographics", "missing");
  } else {
    FieldReader f(doc.at("demographics"), locator + ".demographics", problems);
    auto& d = r.demographics;
    d.patient_id = f.str("patient_id");
    d.first_name = f.str("first_name");
    d.last_name = f.str("last_name");
    auto sex = f.str("sex");
    if (auto s = parse_sex(sex)) {
      d.sex = *s;
    } else if (doc.at("demographics").is_object() && doc.at("demographics").contains("sex") &&
               doc.at("demographics").at("sex").is_string()) {
      f.fail("sex", "expected male or female, got '" + sex + "'");
    }
    d.race = f.str("race");
    d.ethnicity = f.str("ethnicity");
  }

  if (const json* courses = top.array("courses", true)) {
    for (std::size_t i = 0; i < courses->size(); ++i) {
      const json& item = (*courses)[i];
      std::string where = locator + ".courses[" + id_or_index(item, "course_id", i) + "]";
      FieldReader f(item, where, problems);
      TreatmentCourse c;
      c.course_id = f.str("course_id");
      if (const json* icds = f.array("icd_codes", true)) {
        for (const auto& code : *icds) {
          if (code.is_string()) {
            c.icd_codes.push_back(code.get<std::string>());
          } else {
            f.fail("icd_codes", "non-string entry");
          }
        }
      }
      if (const json* plans = f.array("delivered_plans", true)) {
        for (std::size_t k = 0; k < plans->size(); ++k) {
          const json& pj = (*plans)[k];
          FieldReader pf(pj, where + ".delivered_plans[" + id_or_index(pj, "plan_id", k) + "]", problems);
          DeliveredPlan p;
          p.plan_id = pf.str("plan_id");
          auto type = pf.str("radiation_type");
          if (auto t = parse_radiation_type(type)) {
            p.radiation_type = *t;
          } else if (pj.is_object() && pj.contains("radiation_type") && pj.at("radiation_type").is_string()) {
            pf.fail("radiation_type", "unknown radiation type '" + type + "'");
          }
          p.delivered_date = pf.date("delivered_date");
          c.delivered_plans.push_back(std::move(p));
        }
      }
      c.last_treatment_date = f.date("last_treatment_date");
      r.courses.push_back(std::move(c));
    }
  }

  if (const json* dxs = top.array("diagnoses", true)) {
    for (std::size_t i = 0; i < dxs->size(); ++i) {
      const json& item = (*dxs)[i];
      FieldReader f(item, locator + ".diagnoses[" + id_or_index(item, "icd_code", i) + "]", problems);
      Diagnosis dx;
      dx.icd_code = f.str("icd_code");
      dx.description = f.str("description");
      dx.onset_date = f.date("onset_date");
      r.diagnoses.push_back(std::move(dx));
    }
  }

  if (const json* docs = top.array("documents", true)) {
    for (std::size_t i = 0; i < docs->size(); ++i) {
      const json& item = (*docs)[i];
      FieldReader f(item, locator + ".documents[" + id_or_index(item, "doc_id", i) + "]", problems);
      ClinicalDocument d;
      d.doc_id = f.str("doc_id");
      auto kind = f.str("doc_kind");
      if (auto k = parse_doc_kind(kind)) {
        d.kind = *k;
      } else if (item.is_object() && item.contains("doc_kind") && item.at("doc_kind").is_string()) {
        f.fail("doc_kind", "unknown document kind '" + kind + "'");
      }
      if (auto nt = f.optional_str("note_type")) {
        if (auto parsed = parse_note_type(*nt)) {
          d.note_type = *parsed;
        } else {
          f.fail("note_type", "unknown note type '" + *nt + "'");
        }
      }
      d.timestamp = f.datetime("timestamp");
      d.provider = f.str("provider");
      d.department = f.str("department");
      d.body = f.str("body");
      r.documents.push_back(std::move(d));
    }
  }

  if (const json* appts = top.array("appointments", false)) {
    for (std::size_t i = 0; i < appts->size(); ++i) {
      const json& item = (*appts)[i];
      FieldReader f(item, locator + ".appointments[" + id_or_index(item, "appointment_id", i) + "]", problems);
      Appointment a;
      a.appointment_id = f.str("appointment_id");
      a.timestamp = f.datetime("timestamp");
      a.provider = f.str("provider");
      a.department = f.str("department");
      a.description = f.str("description");
      r.appointments.push_back(std::move(a));
    }
  }

  if (const json* msgs = top.array("inbasket_messages", false)) {
    for (std::size_t i = 0; i < msgs->size(); ++i) {
      const json& item = (*msgs)[i];
      FieldReader f(item, locator + ".inbasket_messages[" + id_or_index(item, "message_id", i) + "]", problems);
      InbasketMessage m;
      m.message_id = f.str("message_id");
      m.timestamp = f.datetime("timestamp");
      m.sender = f.str("sender");
      m.subject = f.str("subject");
      m.body = f.str("body");
      r.inbasket_messages.push_back(std::move(m));
    }
  }

  if (problems.size() == problems_before) validate_record(r, locator, problems);
  if (problems.size() != problems_before) return std::nullopt;
  return r;
}

void write_patient_file(const std::filesystem::path& dir, const PatientRecord& record) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / (record.demographics.patient_id + ".json"), std::ios::binary | std::ios::trunc);
  out << to_json(record).dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing patient file for " + record.demographics.patient_id);
}

Store Store::load(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw MissingPath("store directory '" + dir.string() + "' does not exist");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::string> problems;
  std::vector<PatientRecord> records;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::string locator = file.filename().string();
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
      problems.push_back(locator + ": not valid JSON");
      continue;
    }
    if (auto record = parse_patient_record(doc, locator, problems)) records.push_back(std::move(*record));
  }
  if (!problems.empty()) throw MalformedDocument(join(problems, "; "));
  return from_records(std::move(records));
}

Store Store::from_records(std::vector<PatientRecord> records) {
  Store store;
  std::vector<std::string> problems;
  for (auto& r : records) {
    validate_record(r, r.demographics.patient_id, problems);
    std::string id = r.demographics.patient_id;
    if (store.patients_.count(id)) throw DuplicatePatientId("patient_id '" + id + "' appears more than once");
    store.patients_.emplace(std::move(id), std::move(r));
  }
  if (!problems.empty()) throw MalformedDocument(join(problems, "; "));
  return store;
}

bool Store::contains(std::string_view patient_id) const { return patients_.find(patient_id) != patients_.end(); }

const PatientRecord& Store::patient(std::string_view patient_id) const {
  auto it = patients_.find(patient_id);
  if (it == patients_.end()) throw UnknownPatient("no patient with id '" + std::string(patient_id) + "'");
  return it->second;
}

std::vector<std::string> Store::patient_ids() const {
  std::vector<std::string> ids;
  ids.reserve(patients_.size());
  for (const auto& [id, _] : patients_) ids.push_back(id);
  return ids;
}

FunctionResult Store::retrieve(std::string_view patient_id, RetrievalKind kind, const RetrievalFilter& filter) const {
  const PatientRecord& r = patient(patient_id);

  if (filter.note_type && kind != RetrievalKind::clinical_notes) {
    throw FilterNotApplicable("note_type only applies to clinical notes");
  }
  if (filter.date_minimum &&
      (kind == RetrievalKind::details || kind == RetrievalKind::treatment_details ||
       kind == RetrievalKind::diagnosis_details)) {
    throw FilterNotApplicable("date_minimum does not apply to structured details");
  }
  auto after_minimum = [&](DateTime t) { return !filter.date_minimum || t >= start_of(*filter.date_minimum); };

  Section s;
  switch (kind) {
    case RetrievalKind::details: {
      const auto& d = r.demographics;
      open_record(s, 1);
      s.body << "patient_id: " << d.patient_id << "\n"
             << "first_name: " << d.first_name << "\n"
             << "last_name: " << d.last_name << "\n"
             << "sex: " << to_string(d.sex) << "\n"
             << "race: " << d.race << "\n"
             << "ethnicity: " << d.ethnicity << "\n";
      return {finish_payload("Patient details", patient_id, "patient details", s), s.count, true};
    }
    case RetrievalKind::treatment_details: {
      std::vector<const TreatmentCourse*> courses;
      for (const auto& c : r.courses) courses.push_back(&c);
      sort_newest_first(courses, [](const TreatmentCourse& c) { return std::tie(c.last_treatment_date, c.course_id); });
      for (const TreatmentCourse* c : courses) {
        open_record(s, courses.size());
        s.body << "course_id: " << c->course_id << "\n"
               << "icd_codes: " << join(c->icd_codes, ", ") << "\n"
               << "last_treatment_date: " << format_date(c->last_treatment_date) << "\n"
               << "delivered_plans:\n";
        std::vector<const DeliveredPlan*> plans;
        for (const auto& p : c->delivered_plans) plans.push_back(&p);
        sort_newest_first(plans, [](const DeliveredPlan& p) { return std::tie(p.delivered_date, p.plan_id); });
        for (const DeliveredPlan* p : plans) {
          s.body << "  - plan_id: " << p->plan_id << "; radiation_type: " << to_string(p->radiation_type)
                 << "; delivered_date: " << format_date(p->delivered_date) << "\n";
        }
      }
      return {finish_payload("Treatment details", patient_id, "treatment details", s), s.count, s.count > 0};
    }
    case RetrievalKind::diagnosis_details: {
      std::vector<const Diagnosis*> dxs;
      for (const auto& dx : r.diagnoses) dxs.push_back(&dx);
      sort_newest_first(dxs, [](const Diagnosis& dx) { return std::tie(dx.onset_date, dx.icd_code); });
      for (const Diagnosis* dx : dxs) {
        open_record(s, dxs.size());
        s.body << "icd_code: " << dx->icd_code << "\n"
               << "description: " << dx->description << "\n"
               << "onset_date: " << format_date(dx->onset_date) << "\n";
      }
      return {finish_payload("Diagnosis details", patient_id, "diagnosis details", s), s.count, s.count > 0};
    }
    case RetrievalKind::clinical_notes:
    case RetrievalKind::radiology_reports:
    case RetrievalKind::pathology_reports: {
      DocKind wanted = kind == RetrievalKind::clinical_notes      ? DocKind::clinical_note
                       : kind == RetrievalKind::radiology_reports ? DocKind::radiology_report
                                                                  : DocKind::pathology_report;
      std::vector<const ClinicalDocument*> docs;
      for (const auto& d : r.documents) {
        if (d.kind != wanted || !after_minimum(d.timestamp)) continue;
        if (filter.note_type && d.note_type != filter.note_type) continue;
        docs.push_back(&d);
      }
      sort_newest_first(docs, [](const ClinicalDocument& d) { return std::tie(d.timestamp, d.doc_id); });
      for (const ClinicalDocument* d : docs) {
        open_record(s, docs.size());
        s.body << "doc_id: " << d->doc_id << "\n"
               << "timestamp: " << format_datetime(d->timestamp) << "\n";
        if (d->note_type) s.body << "note_type: " << to_string(*d->note_type) << "\n";
        s.body << "provider: " << d->provider << "\n"
               << "department: " << d->department << "\n"
               << "body:\n"
               << d->body << "\n";
      }
      std::string what = wanted == DocKind::clinical_note      ? "clinical notes"
                         : wanted == DocKind::radiology_report ? "radiology reports"
                                                               : "pathology reports";
      std::string title = wanted == DocKind::clinical_note      ? "Clinical notes"
                          : wanted == DocKind::radiology_report ? "Radiology reports"
                                                                : "Pathology reports";
      return {finish_payload(title, patient_id, what, s), s.count, s.count > 0};
    }
    case RetrievalKind::appointments: {
      std::vector<const Appointment*> appts;
      for (const auto& a : r.appointments) {
        if (after_minimum(a.timestamp)) appts.push_back(&a);
      }
      sort_newest_first(appts, [](const Appointment& a) { return std::tie(a.timestamp, a.appointment_id); });
      for (const Appointment* a : appts) {
        open_record(s, appts.size());
        s.body << "appointment_id: " << a->appointment_id << "\n"
               << "timestamp: " << format_datetime(a->timestamp) << "\n"
               << "provider: " << a->provider << "\n"
               << "department: " << a->department << "\n"
               << "description: " << a->description << "\n";
      }
      return {finish_payload("Appointments", patient_id, "appointments", s), s.count, s.count > 0};
    }
    case RetrievalKind::inbasket_messages: {
      std::vector<const InbasketMessage*> msgs;
      for (const auto& m : r.inbasket_messages) {
        if (after_minimum(m.timestamp)) msgs.push_back(&m);
      }
      sort_newest_first(msgs, [](const InbasketMessage& m) { return std::tie(m.timestamp, m.message_id); });
      for (const InbasketMessage* m : msgs) {
        open_record(s, msgs.size());
        s.body << "message_id: " << m->message_id << "\n"
               << "timestamp: " << format_datetime(m->timestamp) << "\n"
               << "sender: " << m->sender << "\n"
               << "subject: " << m->subject << "\n"
               << "body:\n"
               << m->body << "\n";
      }
      return {finish_payload("In-basket messages", patient_id, "in-basket messages", s), s.count, s.count > 0};
    }
  }
  throw std::logic_error("unhandled retrieval kind");
}

FunctionResult Store::physician_appointments(std::string_view provider, std::optional<Date> date_minimum) const {
  struct Row {
    const Appointment* appt;
    const std::string* patient_id;
  };
  std::vector<Row> rows;
  for (const auto& [id, r] : patients_) {
    for (const auto& a : r.appointments) {
      if (a.provider != provider) continue;
      if (date_minimum && a.timestamp < start_of(*date_minimum)) continue;
      rows.push_back({&a, &id});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.appt->timestamp, a.appt->appointment_id) > std::tie(b.appt->timestamp, b.appt->appointment_id);
  });
  Section s;
  for (const Row& row : rows) {
    open_record(s, rows.size());
    s.body << "appointment_id: " << row.appt->appointment_id << "\n"
           << "timestamp: " << format_datetime(row.appt->timestamp) << "\n"
           << "patient_id: " << *row.patient_id << "\n"
           << "department: " << row.appt->department << "\n"
           << "description: " << row.appt->description << "\n";
  }
  std::ostringstream out;
  out << "Appointments for physician " << provider << "\n" << kRecordsCountHeader << s.count << "\n";
  if (s.count == 0) {
    out << "No appointments could be found for physician " << provider << " with the given inputs.\n";
  } else {
    out << s.body.str();
  }
  return {out.str(), s.count, s.count > 0};
}

}  // namespace labelflow
