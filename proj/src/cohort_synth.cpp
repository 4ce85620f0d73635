#include "labelflow/cohort_synth.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "labelflow/csv.hpp"

namespace labelflow {

using nlohmann::json;
namespace {

// Draws are built on the raw mt19937_64 stream, whose output is fixed by the
// standard; library distributions are not, so the tree would vary across
// toolchains.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t bound) { return bound == 0 ? 0 : static_cast<std::size_t>(engine_() % bound); }
  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }
  bool chance(int percent) { return below(100) < static_cast<std::size_t>(percent); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

const std::vector<std::string> kMaleNames{"James", "Robert", "John", "Michael", "David", "William", "Richard",
                                          "Joseph", "Thomas", "Charles", "Daniel", "Mark", "Paul", "Steven"};
const std::vector<std::string> kFemaleNames{"Mary", "Patricia", "Jennifer", "Linda", "Barbara", "Susan", "Jessica",
                                            "Sarah", "Karen", "Nancy", "Lisa", "Margaret", "Sandra", "Ashley"};
const std::vector<std::string> kLastNames{"Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller",
                                          "Davis", "Rodriguez", "Martinez", "Hernandez", "Lopez", "Wilson",
                                          "Anderson", "Thomas", "Taylor", "Moore", "Jackson", "Martin", "Lee",
                                          "Thompson", "White", "Harris", "Clark", "Lewis", "Walker", "Young"};
const std::vector<std::string> kRaces{"White", "White", "White", "Black or African American", "Asian",
                                      "American Indian or Alaska Native", "Native Hawaiian or Other Pacific Islander",
                                      "Other"};
const std::vector<std::string> kEthnicities{"Not Hispanic or Latino", "Not Hispanic or Latino", "Hispanic or Latino"};
const std::vector<std::string> kProviders{"Dr. Alvarez", "Dr. Chen", "Dr. Okafor", "Dr. Patel", "Dr. Novak",
                                          "Dr. Schmidt", "Dr. Rossi", "Dr. Tanaka"};

struct Site {
  std::string code;
  std::string icd;
  std::string description;
};

const std::vector<Site> kHeadNeckSites{
    {"HN", "C01", "Malignant neoplasm of base of tongue"},
    {"HN", "C09.9", "Malignant neoplasm of tonsil, unspecified"},
    {"HN", "C10.9", "Malignant neoplasm of oropharynx, unspecified"},
    {"HN", "C32.9", "Malignant neoplasm of larynx, unspecified"},
    {"HN", "C06.9", "Malignant neoplasm of mouth, unspecified"},
};
const Site kProstateSite{"PROS", "C61", "Malignant neoplasm of prostate"};
const Site kPelvicNodes{"PROS", "C77.5", "Secondary malignant neoplasm of intrapelvic lymph nodes"};
const std::vector<Site> kTier1Sites{
    kProstateSite,
    {"HN", "C10.9", "Malignant neoplasm of oropharynx, unspecified"},
    {"LUNG", "C34.90", "Malignant neoplasm of unspecified part of unspecified bronchus or lung"},
    {"BRST", "C50.911", "Malignant neoplasm of unspecified site of right female breast"},
    {"BRAIN", "C71.9", "Malignant neoplasm of brain, unspecified"},
    {"ESO", "C15.9", "Malignant neoplasm of esophagus, unspecified"},
    {"RECT", "C20", "Malignant neoplasm of rectum"},
};

constexpr std::string_view kExposedBone = "exposed mandibular bone noted, persisting for ";
constexpr std::string_view kHealed = "healed completely";

std::string id_prefix(CohortTask t) {
  switch (t) {
    case CohortTask::tier1_qa:
      return "QA";
    case CohortTask::orn:
      return "ORN";
    case CohortTask::prostate_recurrence:
      return "PRC";
    case CohortTask::hn_recurrence:
      return "HNR";
  }
  return "PT";
}

std::string patient_id_for(CohortTask t, std::size_t index, std::size_t cohort_size) {
  std::size_t width = 4;
  for (std::size_t n = cohort_size; n >= 10000; n /= 10) ++width;
  std::string digits = std::to_string(index + 1);
  return id_prefix(t) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::string psa_text(int hundredths) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%d.%02d", hundredths / 100, hundredths % 100);
  return buf;
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Accumulates one patient record; document ids are unique per patient.
class RecordBuilder {
 public:
  RecordBuilder(Draw& draw, std::string patient_id) : draw_(draw) { record_.demographics.patient_id = std::move(patient_id); }

  PatientRecord& record() { return record_; }
  const std::string& id() const { return record_.demographics.patient_id; }

  void demographics(std::optional<Sex> forced_sex) {
    Demographics& d = record_.demographics;
    d.sex = forced_sex ? *forced_sex : (draw_.chance(50) ? Sex::male : Sex::female);
    d.first_name = draw_.pick(d.sex == Sex::male ? kMaleNames : kFemaleNames);
    d.last_name = draw_.pick(kLastNames);
    d.race = draw_.pick(kRaces);
    d.ethnicity = draw_.pick(kEthnicities);
  }

  std::string document(DocKind kind, std::optional<NoteType> note_type, Date day, std::string department,
                       std::string body) {
    ClinicalDocument doc;
    doc.doc_id = id() + "-D" + two_digits(++doc_seq_);
    doc.kind = kind;
    doc.note_type = note_type;
    doc.timestamp = start_of(day) + std::chrono::hours{draw_.between(8, 16)} + std::chrono::minutes{draw_.between(0, 59)};
    doc.provider = draw_.pick(kProviders);
    doc.department = std::move(department);
    doc.body = std::move(body);
    record_.documents.push_back(doc);
    return doc.doc_id;
  }

  std::string note(NoteType type, Date day, std::string body) {
    static const std::map<NoteType, std::string> departments{
        {NoteType::radiation_oncology, "Radiation Oncology"}, {NoteType::ent, "Otolaryngology"},
        {NoteType::surgery, "Oral and Maxillofacial Surgery"}, {NoteType::urology, "Urology"},
        {NoteType::radiology, "Radiology"}, {NoteType::pathology, "Pathology"}, {NoteType::other, "Internal Medicine"}};
    return document(DocKind::clinical_note, type, day, departments.at(type), std::move(body));
  }

  std::string radiology(Date day, std::string body) {
    return document(DocKind::radiology_report, std::nullopt, day, "Radiology", std::move(body));
  }

  std::string pathology(Date day, std::string body) {
    return document(DocKind::pathology_report, std::nullopt, day, "Pathology", std::move(body));
  }

  void diagnosis(const Site& site, Date onset) { record_.diagnoses.push_back({site.icd, site.description, onset}); }

  // One course of 1-3 plans sharing a modality; returns the last delivery date.
  Date course(std::string course_id, std::vector<std::string> icd_codes, const std::string& plan_stem, Date start,
              std::optional<RadiationType> forced_type = std::nullopt) {
    TreatmentCourse c;
    c.course_id = std::move(course_id);
    c.icd_codes = std::move(icd_codes);
    RadiationType type = forced_type ? *forced_type
                                     : (draw_.chance(60) ? RadiationType::photon
                                                         : (draw_.chance(85) ? RadiationType::proton
                                                                             : RadiationType::electron));
    const int plans = draw_.between(1, 3);
    Date day = start + std::chrono::days{draw_.between(28, 42)};
    for (int k = 0; k < plans; ++k) {
      c.delivered_plans.push_back({plan_stem + "_" + std::to_string(k + 1), type, day});
      day += std::chrono::days{draw_.between(5, 14)};
    }
    c.last_treatment_date = c.delivered_plans.back().delivered_date;
    record_.courses.push_back(c);
    return c.last_treatment_date;
  }

  void appointments(Date around) {
    const char* descriptions[] = {"CT simulation", "Follow-up visit", "Nutrition consult", "Dental evaluation"};
    for (int k = 0; k < 2; ++k) {
      Appointment a;
      a.appointment_id = id() + "-A" + two_digits(static_cast<int>(record_.appointments.size()) + 1);
      a.timestamp = start_of(around + std::chrono::days{draw_.between(0, 400)}) + std::chrono::hours{draw_.between(8, 16)};
      a.provider = draw_.pick(kProviders);
      a.department = "Radiation Oncology";
      a.description = descriptions[draw_.below(4)];
      record_.appointments.push_back(a);
    }
    InbasketMessage m;
    m.message_id = id() + "-M01";
    m.timestamp = start_of(around + std::chrono::days{draw_.between(1, 200)}) + std::chrono::hours{draw_.between(8, 16)};
    m.sender = record_.demographics.first_name + " " + record_.demographics.last_name;
    m.subject = "Follow-up scheduling";
    m.body = "Can my next follow-up visit be moved to a morning slot?";
    record_.inbasket_messages.push_back(m);
  }

 private:
  static std::string two_digits(int n) { return (n < 10 ? "0" : "") + std::to_string(n); }

  Draw& draw_;
  PatientRecord record_;
  int doc_seq_ = 0;
};

Date random_onset(Draw& draw) {
  return Date{std::chrono::year{2012} / std::chrono::January / 1} + std::chrono::days{draw.between(0, 3000)};
}

std::vector<Date> follow_ups(Draw& draw, Date last_treatment, int count) {
  std::vector<Date> days;
  Date day = last_treatment;
  for (int k = 0; k < count; ++k) {
    day += std::chrono::days{draw.between(75, 110)};
    days.push_back(day);
  }
  return days;
}

struct Built {
  PatientRecord record;
  std::vector<std::string> evidence;
};

Built build_orn(Draw& draw, const std::string& id, bool positive, int stage) {
  RecordBuilder b(draw, id);
  b.demographics(std::nullopt);
  const Site& site = draw.pick(kHeadNeckSites);
  const Date onset = random_onset(draw);
  b.diagnosis(site, onset);
  b.pathology(onset, "Biopsy of the primary site: invasive squamous cell carcinoma, HPV status recorded.");
  b.note(NoteType::radiation_oncology, onset + std::chrono::days{10},
         "Consultation for " + site.description + ". Plan definitive radiotherapy with concurrent chemotherapy.");
  const Date last = b.course("1HN", {site.icd}, "HN1", onset + std::chrono::days{14});
  b.note(NoteType::ent, onset + std::chrono::days{5}, "Pre-treatment dental extraction of tooth 31 completed.");

  const auto visits = follow_ups(draw, last, draw.between(4, 7));
  std::vector<std::string> evidence;
  const std::size_t event_visit = draw.below(visits.size() - 2);
  for (std::size_t v = 0; v < visits.size(); ++v) {
    const NoteType type = v % 2 == 0 ? NoteType::ent : NoteType::radiation_oncology;
    if (positive && v == event_visit) {
      const int months = draw.between(3, 9);
      evidence.push_back(b.note(type, visits[v],
                                "Follow-up examination. Exposed mandibular bone noted, persisting for " +
                                    std::to_string(months) + " months. Pentoxifylline and tocopherol started."));
    } else if (!positive && v == event_visit && draw.chance(30)) {
      const int months = draw.between(1, 5);
      b.note(type, visits[v],
             "Follow-up examination. Exposed mandibular bone noted, persisting for " + std::to_string(months) +
                 " months. The area has since healed completely with conservative care.");
    } else {
      b.note(type, visits[v], "Routine follow-up. Oral mucosa intact without bone exposure. Mild xerostomia.");
    }
  }
  if (positive && stage >= 2) {
    evidence.push_back(b.note(NoteType::surgery, visits[event_visit + 1],
                              "Non-healing lesion refractory to medical therapy. Patient underwent sequestrectomy "
                              "and saucerization of the mandible."));
  }
  if (positive && stage == 3) {
    evidence.push_back(b.radiology(visits[event_visit + 2],
                                   "CT mandible: pathologic fracture of the mandible at the site of prior bone "
                                   "exposure with full-thickness cortical destruction."));
  } else {
    b.radiology(visits.back(), "CT neck with contrast: post-treatment changes. No suspicious osseous changes.");
  }
  b.appointments(last);
  return {std::move(b.record()), std::move(evidence)};
}

Built build_prostate(Draw& draw, const std::string& id, bool positive) {
  RecordBuilder b(draw, id);
  b.demographics(Sex::male);
  const Date onset = random_onset(draw);
  const bool nodes = draw.chance(20);
  b.diagnosis(kProstateSite, onset);
  std::vector<std::string> codes{kProstateSite.icd};
  if (nodes) {
    b.diagnosis(kPelvicNodes, onset);
    codes.push_back(kPelvicNodes.icd);
  }
  b.pathology(onset, "Prostate needle biopsy: adenocarcinoma of the prostate, Gleason 3+4=7.");
  b.note(NoteType::urology, onset + std::chrono::days{3},
         "Urology consultation. PSA: " + psa_text(draw.between(450, 1800)) + " ng/mL at diagnosis.");
  const Date last = b.course(draw.chance(70) ? "1PROS" : "PROS", codes, "PROS1", onset + std::chrono::days{20});

  const auto visits = follow_ups(draw, last, draw.between(5, 8));
  std::vector<std::string> evidence;
  const bool by_biopsy = positive && draw.chance(20);
  // PSA in hundredths of ng/mL: halving down to the nadir at the middle
  // visit, then either flat within 1.5 ng/mL or rising to nadir + 2 or more
  // over the last two visits.
  int value = draw.between(90, 200);
  const int nadir = draw.between(5, 50);
  const std::size_t nadir_visit = visits.size() / 2;
  const std::size_t rise_from = positive && !by_biopsy ? visits.size() - 2 : visits.size();
  for (std::size_t v = 0; v < visits.size(); ++v) {
    if (v < nadir_visit) {
      value = std::max(nadir, value / 2);
    } else if (v == nadir_visit) {
      value = nadir;
    } else if (v < rise_from) {
      value = nadir + draw.between(0, draw.chance(30) ? 150 : 40);
    } else {
      value = nadir + 200 + (draw.chance(50) ? 0 : draw.between(1, 250));
    }
    const std::string doc_id = b.note(NoteType::urology, visits[v],
                                      "Surveillance after prostate radiotherapy. PSA: " + psa_text(value) + " ng/mL.");
    if (v >= rise_from) evidence.push_back(doc_id);
  }
  if (by_biopsy) {
    evidence.push_back(b.pathology(visits.back() + std::chrono::days{10},
                                   "Transrectal prostate biopsy: biopsy-proven local recurrence of adenocarcinoma."));
  }
  b.note(NoteType::radiation_oncology, visits.front(), "Follow-up after prostate radiotherapy. Tolerating well.");
  b.radiology(visits.back(), "MRI pelvis: post-radiation changes of the prostate gland.");
  b.appointments(last);
  return {std::move(b.record()), std::move(evidence)};
}

Built build_hn_recurrence(Draw& draw, const std::string& id, bool positive) {
  RecordBuilder b(draw, id);
  b.demographics(std::nullopt);
  const Site& site = draw.pick(kHeadNeckSites);
  const Date onset = random_onset(draw);
  b.diagnosis(site, onset);
  b.pathology(onset, "Biopsy of the primary site: invasive squamous cell carcinoma.");
  b.radiology(onset + std::chrono::days{2}, "PET/CT staging: FDG-avid primary tumor with ipsilateral nodal disease.");
  const Date last = b.course(draw.chance(70) ? "1HN" : "HN", {site.icd}, "HN1", onset + std::chrono::days{14});

  const auto visits = follow_ups(draw, last, draw.between(4, 6));
  std::vector<std::string> evidence;
  const std::size_t event_visit = 1 + draw.below(visits.size() - 1);
  for (std::size_t v = 0; v < visits.size(); ++v) {
    if (positive && v == event_visit) {
      if (draw.chance(70)) {
        evidence.push_back(
            b.radiology(visits[v], "PET/CT restaging: findings consistent with locoregional recurrence in the neck."));
      } else {
        evidence.push_back(b.pathology(visits[v], "Neck node biopsy: positive for recurrent squamous cell carcinoma."));
      }
    } else {
      b.radiology(visits[v], "PET/CT surveillance: No evidence of disease.");
    }
    b.note(NoteType::ent, visits[v] + std::chrono::days{3}, "ENT surveillance visit. Flexible laryngoscopy performed.");
  }
  b.note(NoteType::radiation_oncology, visits.front(), "Follow-up after head and neck radiotherapy.");
  b.appointments(last);
  return {std::move(b.record()), std::move(evidence)};
}

Built build_tier1(Draw& draw, const std::string& id) {
  RecordBuilder b(draw, id);
  b.demographics(std::nullopt);
  Date day = random_onset(draw);
  const int courses = draw.between(1, 3);
  std::set<std::string> used;
  for (int k = 0; k < courses; ++k) {
    const Site& site = draw.pick(kTier1Sites);
    b.diagnosis(site, day);
    std::string course_id;
    do {
      course_id = k == 0 || draw.chance(50) ? std::to_string(draw.between(1, 3)) + site.code
                                            : site.code + (draw.chance(50) ? "_BST" : "_R");
    } while (!used.insert(course_id).second);
    std::vector<std::string> codes{site.icd};
    if (site.icd == "C61" && draw.chance(30)) codes.push_back("C77.5");
    const std::string stem = site.code + std::to_string(k + 1);
    day = b.course(course_id, codes, stem, day) + std::chrono::days{draw.between(120, 700)};
  }
  b.note(NoteType::radiation_oncology, day, "Survivorship visit. No acute concerns.");
  b.appointments(day);
  return {std::move(b.record()), {}};
}

struct Slot {
  bool baseline = false;
  Plant plant = Plant::none;
};

std::vector<Slot> assign_slots(const CohortSpec& spec, Draw& draw) {
  auto side = [&](bool baseline, std::size_t count, std::size_t gt, std::size_t me, std::size_t ind) {
    std::vector<Slot> slots(count, Slot{baseline, Plant::none});
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    draw.shuffle(order);
    std::size_t next = 0;
    const std::pair<Plant, std::size_t> quotas[] = {{Plant::gt_error, gt}, {Plant::model_error, me}, {Plant::indeterminate, ind}};
    for (auto [plant, n] : quotas) {
      for (std::size_t k = 0; k < n; ++k) slots[order[next++]].plant = plant;
    }
    return slots;
  };
  std::vector<Slot> slots = side(true, spec.n_positive, spec.gt_errors.among_positive,
                                 spec.model_errors.among_positive, spec.indeterminate.among_positive);
  auto negatives = side(false, spec.n_negative, spec.gt_errors.among_negative, spec.model_errors.among_negative,
                        spec.indeterminate.among_negative);
  slots.insert(slots.end(), negatives.begin(), negatives.end());
  draw.shuffle(slots);
  return slots;
}

Date first_course_end(const PatientRecord& record) {
  const TreatmentCourse* first = nullptr;
  for (const auto& c : record.courses) {
    if (c.delivered_plans.empty()) continue;
    if (!first || c.delivered_plans.front().delivered_date < first->delivered_plans.front().delivered_date) first = &c;
  }
  return first ? first->last_treatment_date : Date{};
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

json split_json(const PlantedSplit& s) { return {{"among_negative", s.among_negative}, {"among_positive", s.among_positive}}; }

PlantedSplit split_from(const json& j, const PlantedSplit& fallback) {
  PlantedSplit s = fallback;
  if (j.is_null()) return s;
  if (!j.is_object()) throw InfeasibleSpec("planted counts must be objects");
  if (j.contains("among_negative")) s.among_negative = j.at("among_negative").get<std::size_t>();
  if (j.contains("among_positive")) s.among_positive = j.at("among_positive").get<std::size_t>();
  return s;
}

}  // namespace

std::string_view to_string(CohortTask t) {
  switch (t) {
    case CohortTask::tier1_qa:
      return "tier1_qa";
    case CohortTask::orn:
      return "orn";
    case CohortTask::prostate_recurrence:
      return "prostate_recurrence";
    case CohortTask::hn_recurrence:
      return "hn_recurrence";
  }
  return "orn";
}

std::optional<CohortTask> parse_cohort_task(std::string_view text) {
  for (CohortTask t : {CohortTask::tier1_qa, CohortTask::orn, CohortTask::prostate_recurrence, CohortTask::hn_recurrence}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

TaskName prompt_task(CohortTask t) {
  switch (t) {
    case CohortTask::tier1_qa:
      return TaskName::tier1_qa;
    case CohortTask::orn:
      return TaskName::orn;
    default:
      return TaskName::recurrence;
  }
}

std::optional<Tier2Task> tier2_task(CohortTask t) {
  switch (t) {
    case CohortTask::orn:
      return Tier2Task::orn;
    case CohortTask::prostate_recurrence:
      return Tier2Task::prostate_recurrence;
    case CohortTask::hn_recurrence:
      return Tier2Task::hn_recurrence;
    default:
      return std::nullopt;
  }
}

CohortSpec CohortSpec::defaults(CohortTask task) {
  CohortSpec s;
  s.task = task;
  switch (task) {
    case CohortTask::tier1_qa:
      s.n_negative = 500;
      s.truncated_courses = 3;
      break;
    case CohortTask::orn:
      s.n_positive = 34;
      s.n_negative = 199;
      s.gt_errors = {18, 3};
      s.model_errors = {11, 0};
      s.indeterminate = {3, 1};
      break;
    case CohortTask::prostate_recurrence:
      s.n_positive = 40;
      s.n_negative = 40;
      s.gt_errors = {2, 0};
      s.model_errors = {1, 3};
      s.indeterminate = {0, 0};
      break;
    case CohortTask::hn_recurrence:
      s.n_positive = 48;
      s.n_negative = 34;
      s.gt_errors = {2, 1};
      s.model_errors = {1, 1};
      s.indeterminate = {1, 0};
      break;
  }
  return s;
}

void CohortSpec::validate() const {
  if (task == CohortTask::tier1_qa) {
    if (gt_errors.total() + model_errors.total() + indeterminate.total() > 0) {
      throw InfeasibleSpec("tier1_qa cohorts carry no planted label discrepancies");
    }
    if (truncated_courses > size()) {
      throw InfeasibleSpec(std::to_string(truncated_courses) + " truncated outputs requested for " +
                           std::to_string(size()) + " patients");
    }
    return;
  }
  if (truncated_courses > 0) throw InfeasibleSpec("course truncation applies to tier1_qa cohorts only");
  const std::size_t neg = gt_errors.among_negative + model_errors.among_negative + indeterminate.among_negative;
  const std::size_t pos = gt_errors.among_positive + model_errors.among_positive + indeterminate.among_positive;
  if (neg > n_negative) {
    throw InfeasibleSpec(std::to_string(neg) + " planted discrepancies among " + std::to_string(n_negative) +
                         " baseline negatives");
  }
  if (pos > n_positive) {
    throw InfeasibleSpec(std::to_string(pos) + " planted discrepancies among " + std::to_string(n_positive) +
                         " baseline positives");
  }
}

json to_json(const CohortSpec& s) {
  return {{"task", to_string(s.task)},
          {"n_positive", s.n_positive},
          {"n_negative", s.n_negative},
          {"seed", s.seed},
          {"planted",
           {{"gt_error", split_json(s.gt_errors)},
            {"model_error", split_json(s.model_errors)},
            {"indeterminate", split_json(s.indeterminate)}}},
          {"truncated_courses", s.truncated_courses}};
}

CohortSpec cohort_spec_from_json(const json& j) {
  try {
    if (!j.is_object()) throw InfeasibleSpec("cohort spec must be an object");
    const std::string task_text = j.at("task").get<std::string>();
    auto task = parse_cohort_task(task_text);
    if (!task) throw InfeasibleSpec("unknown task '" + task_text + "'");
    CohortSpec s = CohortSpec::defaults(*task);
    if (j.contains("n_positive")) s.n_positive = j.at("n_positive").get<std::size_t>();
    if (j.contains("n_negative")) s.n_negative = j.at("n_negative").get<std::size_t>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("truncated_courses")) s.truncated_courses = j.at("truncated_courses").get<std::size_t>();
    if (j.contains("planted")) {
      const json& p = j.at("planted");
      s.gt_errors = split_from(p.value("gt_error", json()), s.gt_errors);
      s.model_errors = split_from(p.value("model_error", json()), s.model_errors);
      s.indeterminate = split_from(p.value("indeterminate", json()), s.indeterminate);
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InfeasibleSpec(std::string("cohort spec: ") + e.what());
  }
}

std::string_view to_string(Plant p) {
  switch (p) {
    case Plant::none:
      return "";
    case Plant::gt_error:
      return "gt_error";
    case Plant::model_error:
      return "model_error";
    case Plant::indeterminate:
      return "indeterminate";
  }
  return "";
}

bool ManifestEntry::predicted_label() const {
  return true_label != (plant == Plant::model_error || plant == Plant::indeterminate);
}

const ManifestEntry* TruthManifest::find(std::string_view patient_id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), patient_id,
                             [](const ManifestEntry& e, std::string_view id) { return e.patient_id < id; });
  return it != entries.end() && it->patient_id == patient_id ? &*it : nullptr;
}

void write_manifest_csv(std::ostream& out, const TruthManifest& manifest) {
  write_csv_row(out, {"patient_id", "task", "true_label", "baseline_label", "flags", "true_stage", "evidence_doc_ids"});
  for (const auto& e : manifest.entries) {
    const bool labeled = e.task != CohortTask::tier1_qa;
    std::vector<std::string> flags;
    if (e.plant != Plant::none) flags.emplace_back(to_string(e.plant));
    if (e.truncated_course) flags.emplace_back("truncated_course");
    std::string joined_flags, joined_docs;
    for (const auto& f : flags) joined_flags += (joined_flags.empty() ? "" : ";") + f;
    for (const auto& d : e.evidence_doc_ids) joined_docs += (joined_docs.empty() ? "" : ";") + d;
    write_csv_row(out, {e.patient_id, std::string(to_string(e.task)), labeled ? yes_no(e.true_label) : "",
                        labeled ? yes_no(e.baseline_label) : "", joined_flags,
                        e.true_stage ? std::to_string(*e.true_stage) : "", joined_docs});
  }
}

TruthManifest read_manifest_csv(const std::filesystem::path& path) {
  CsvTable table = read_csv_file(path.string());
  const auto col = [&](std::string_view name) { return table.require_column(name); };
  const std::size_t id = col("patient_id"), task = col("task"), truth = col("true_label"),
                    baseline = col("baseline_label"), flags = col("flags"), stage = col("true_stage"),
                    docs = col("evidence_doc_ids");
  auto split = [](const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    for (std::string part; std::getline(in, part, ';');) {
      if (!part.empty()) parts.push_back(part);
    }
    return parts;
  };
  TruthManifest manifest;
  for (const auto& row : table.rows) {
    ManifestEntry e;
    e.patient_id = row[id];
    auto parsed_task = parse_cohort_task(row[task]);
    if (!parsed_task) throw std::runtime_error(path.string() + ": unknown task '" + row[task] + "'");
    e.task = *parsed_task;
    e.true_label = parse_boolean_label(row[truth]).value_or(false);
    e.baseline_label = parse_boolean_label(row[baseline]).value_or(false);
    for (const auto& f : split(row[flags])) {
      if (f == "truncated_course") {
        e.truncated_course = true;
      } else if (f == "gt_error") {
        e.plant = Plant::gt_error;
      } else if (f == "model_error") {
        e.plant = Plant::model_error;
      } else if (f == "indeterminate") {
        e.plant = Plant::indeterminate;
      } else {
        throw std::runtime_error(path.string() + ": unknown flag '" + f + "'");
      }
    }
    if (!row[stage].empty()) e.true_stage = std::stoi(row[stage]);
    e.evidence_doc_ids = split(row[docs]);
    manifest.entries.push_back(std::move(e));
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const auto& a, const auto& b) { return a.patient_id < b.patient_id; });
  return manifest;
}

GeneratedCohort generate_cohort(const CohortSpec& spec) {
  spec.validate();
  GeneratedCohort cohort;
  cohort.spec = spec;
  Draw draw(spec.seed);

  if (spec.task == CohortTask::tier1_qa) {
    std::vector<std::size_t> order(spec.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    draw.shuffle(order);
    std::set<std::size_t> truncated(order.begin(), order.begin() + static_cast<long>(spec.truncated_courses));
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const std::string id = patient_id_for(spec.task, i, spec.size());
      Built built = build_tier1(draw, id);
      ManifestEntry e;
      e.patient_id = id;
      e.task = spec.task;
      e.truncated_course = truncated.count(i) > 0;
      cohort.records.push_back(std::move(built.record));
      cohort.manifest.entries.push_back(std::move(e));
    }
    return cohort;
  }

  const std::vector<Slot> slots = assign_slots(spec, draw);
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const std::string id = patient_id_for(spec.task, i, slots.size());
    ManifestEntry e;
    e.patient_id = id;
    e.task = spec.task;
    e.plant = slots[i].plant;
    e.baseline_label = slots[i].baseline;
    e.true_label = e.plant == Plant::gt_error ? !e.baseline_label : e.baseline_label;
    Built built;
    switch (spec.task) {
      case CohortTask::orn: {
        const int roll = draw.between(1, 10);
        const int stage = e.true_label ? (roll <= 5 ? 1 : roll <= 8 ? 2 : 3) : 0;
        e.true_stage = stage;
        built = build_orn(draw, id, e.true_label, stage);
        break;
      }
      case CohortTask::prostate_recurrence:
        built = build_prostate(draw, id, e.true_label);
        break;
      case CohortTask::hn_recurrence:
        built = build_hn_recurrence(draw, id, e.true_label);
        break;
      case CohortTask::tier1_qa:
        break;
    }
    e.evidence_doc_ids = std::move(built.evidence);
    cohort.records.push_back(std::move(built.record));
    cohort.manifest.entries.push_back(std::move(e));
  }
  return cohort;
}

std::vector<BaselineRow> baseline_rows(const TruthManifest& manifest) {
  std::vector<BaselineRow> rows;
  for (const auto& e : manifest.entries) {
    if (auto t = tier2_task(e.task)) rows.push_back({e.patient_id, *t, e.baseline_label});
  }
  return rows;
}

std::vector<VerdictRecord> planted_verdicts(const TruthManifest& manifest) {
  std::vector<VerdictRecord> log;
  for (const auto& e : manifest.entries) {
    auto task = tier2_task(e.task);
    if (!task || e.plant == Plant::none) continue;
    VerdictRecord r;
    r.seq = log.size() + 1;
    r.verdict.patient_id = e.patient_id;
    r.verdict.task = *task;
    r.verdict.verdict = e.plant == Plant::gt_error      ? Verdict::ground_truth_error
                        : e.plant == Plant::model_error ? Verdict::model_error
                                                        : Verdict::indeterminate;
    r.verdict.note = "planted " + std::string(to_string(e.plant));
    r.verdict.reviewer = "cohort-synth";
    r.verdict.decided_at = "2025-01-01T00:00:00Z";
    log.push_back(std::move(r));
  }
  return log;
}

void write_cohort(const GeneratedCohort& cohort, const std::filesystem::path& out_dir) {
  const auto store_dir = out_dir / "store";
  std::filesystem::remove_all(store_dir);
  std::filesystem::create_directories(store_dir);
  for (const auto& r : cohort.records) write_patient_file(store_dir, r);

  auto open = [](const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
  };
  {
    auto out = open(out_dir / "truth_manifest.csv");
    write_manifest_csv(out, cohort.manifest);
  }
  {
    auto out = open(out_dir / "cohort_spec.json");
    out << to_json(cohort.spec).dump(2) << "\n";
  }
  if (cohort.spec.task == CohortTask::tier1_qa) {
    Store store = Store::from_records(cohort.records);
    std::vector<std::string> ids, targets;
    for (const auto& e : cohort.manifest.entries) {
      ids.push_back(e.patient_id);
      if (e.truncated_course) targets.push_back(e.patient_id);
    }
    auto fixture = plant_tier1_bug(store, tier1_reference_outputs(store, ids), targets);
    auto out = open(out_dir / "fixtures" / "tier1.csv");
    write_results_csv(out, fixture, TaskName::tier1_qa);
    return;
  }
  {
    auto out = open(out_dir / "baseline.csv");
    write_csv_row(out, {"patient_id", "task", "baseline_label"});
    for (const auto& b : baseline_rows(cohort.manifest)) {
      write_csv_row(out, {b.patient_id, std::string(to_string(b.task)), yes_no(b.label)});
    }
  }
  write_verdict_log(out_dir / "planted_verdicts.jsonl", planted_verdicts(cohort.manifest));
}

OracleLabel oracle_label(const PatientRecord& record, CohortTask task) {
  OracleLabel label;
  switch (task) {
    case CohortTask::tier1_qa:
      throw std::invalid_argument("tier1_qa has no outcome label");
    case CohortTask::orn: {
      static const std::regex exposure(std::string(kExposedBone) + "(\\d+) months");
      for (const auto& doc : record.documents) {
        const std::string text = lower(doc.body);
        int stage = 0;
        if (text.find("pathologic fracture of the mandible") != std::string::npos ||
            text.find("full-thickness") != std::string::npos) {
          stage = 3;
        } else if (text.find("sequestrectomy") != std::string::npos) {
          stage = 2;
        } else if (std::smatch m; std::regex_search(text, m, exposure) && std::stoi(m[1].str()) >= 3 &&
                                  text.find(kHealed) == std::string::npos) {
          stage = 1;
        }
        if (stage > 0) label.evidence_doc_ids.push_back(doc.doc_id);
        label.stage = std::max(label.stage, stage);
      }
      label.positive = label.stage >= 1;
      break;
    }
    case CohortTask::prostate_recurrence: {
      static const std::regex psa("psa: (\\d+)\\.(\\d{2}) ng/ml");
      const DateTime from = start_of(first_course_end(record));
      std::vector<const ClinicalDocument*> docs;
      for (const auto& doc : record.documents) {
        if (doc.timestamp >= from) docs.push_back(&doc);
      }
      std::sort(docs.begin(), docs.end(), [](const auto* a, const auto* b) {
        return std::tie(a->timestamp, a->doc_id) < std::tie(b->timestamp, b->doc_id);
      });
      std::optional<int> nadir;
      for (const ClinicalDocument* doc : docs) {
        const std::string text = lower(doc->body);
        if (text.find("biopsy-proven local recurrence") != std::string::npos) {
          label.evidence_doc_ids.push_back(doc->doc_id);
          continue;
        }
        std::smatch m;
        if (!std::regex_search(text, m, psa)) continue;
        const int value = std::stoi(m[1].str()) * 100 + std::stoi(m[2].str());
        if (nadir && value >= *nadir + 200) label.evidence_doc_ids.push_back(doc->doc_id);
        nadir = nadir ? std::min(*nadir, value) : value;
      }
      label.positive = !label.evidence_doc_ids.empty();
      break;
    }
    case CohortTask::hn_recurrence: {
      const DateTime from = start_of(first_course_end(record));
      for (const auto& doc : record.documents) {
        if (doc.timestamp < from) continue;
        const std::string text = lower(doc.body);
        if (text.find("consistent with locoregional recurrence") != std::string::npos ||
            text.find("positive for recurrent squamous cell carcinoma") != std::string::npos) {
          label.evidence_doc_ids.push_back(doc.doc_id);
        }
      }
      label.positive = !label.evidence_doc_ids.empty();
      break;
    }
  }
  return label;
}

std::vector<TaskResult> tier1_reference_outputs(const Store& store, const std::vector<std::string>& patient_ids) {
  std::vector<TaskResult> out;
  for (const auto& id : patient_ids) {
    const PatientRecord& r = store.patient(id);
    Tier1Label label;
    label.patient_id = r.demographics.patient_id;
    label.first_name = r.demographics.first_name;
    label.last_name = r.demographics.last_name;
    label.sex = std::string(to_string(r.demographics.sex));
    label.race = r.demographics.race;
    label.ethnicity = r.demographics.ethnicity;
    for (const auto& c : r.courses) {
      ReportedCourse rc;
      rc.course_id = c.course_id;
      rc.icd_codes = c.icd_codes;
      for (const auto& p : c.delivered_plans) rc.delivered_plan_ids.push_back(p.plan_id);
      rc.radiation_type = c.delivered_plans.empty() ? "photon" : std::string(to_string(c.delivered_plans.front().radiation_type));
      label.delivered_courses.push_back(std::move(rc));
    }
    TaskResult result;
    result.patient_id = id;
    result.status = TaskStatus::ok;
    result.label = std::move(label);
    result.records_count = 1 + r.courses.size();
    result.turns = 3;
    out.push_back(std::move(result));
  }
  return out;
}

std::string strip_leading_digits(std::string_view course_id) {
  std::size_t k = 0;
  while (k < course_id.size() && std::isdigit(static_cast<unsigned char>(course_id[k]))) ++k;
  return std::string(course_id.substr(k));
}

std::vector<TaskResult> plant_tier1_bug(const Store& store, std::vector<TaskResult> outputs,
                                        const std::vector<std::string>& targets, TruncationMode mode) {
  for (const auto& target : targets) {
    if (!store.contains(target)) throw UnknownPatient("patient " + target + " is not in the store");
    auto it = std::find_if(outputs.begin(), outputs.end(), [&](const TaskResult& r) { return r.patient_id == target; });
    if (it == outputs.end()) throw UnknownPatient("no agent output for " + target);
    Tier1Label* label = it->label ? std::get_if<Tier1Label>(&*it->label) : nullptr;
    bool cut = false;
    if (label) {
      for (auto& course : label->delivered_courses) {
        if (course.course_id.empty() || !std::isdigit(static_cast<unsigned char>(course.course_id.front()))) continue;
        course.course_id = strip_leading_digits(course.course_id);
        cut = true;
        if (mode == TruncationMode::first_course) break;
      }
    }
    if (!cut) throw NoDigitPrefixedCourse("patient " + target + " has no course id starting with a digit");
  }
  return outputs;
}

}  // namespace labelflow
