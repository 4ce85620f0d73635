#pragma once

#include <chrono>
#include <set>
#include <string>
#include <vector>

#include "labelflow/agent.hpp"
#include "labelflow/cohort_synth.hpp"
#include "labelflow/ehr_store.hpp"
#include "labelflow/error.hpp"
#include "labelflow/structured_output.hpp"

namespace labelflow {

LABELFLOW_DEFINE_ERROR(UnknownPatientInScript);

struct ScriptBehavior {
  std::chrono::milliseconds latency_per_call{0};
  // Patients whose final answer is prose without a structured block.
  std::set<std::string> prose_patients;
};

// Deterministic stand-in for the language model. It replays the tool calls
// the task prompt asks for, one batch per turn, and answers from the truth
// manifest. Stateless between calls, so safe for concurrent conversations.
//
//   tier1_qa:   details, treatment details, then the fenced object; course ids
//               lose their leading digits for truncated_course patients.
//   orn:        details/diagnoses/treatment, reports, clinical notes of each
//               listed type, then the four sections and the single-quoted
//               object with the summed record count.
//   recurrence: treatment and diagnoses first, then notes and reports from
//               the first course's last treatment date, then the answer.
class ScriptedBackend final : public ModelBackend {
 public:
  ScriptedBackend(TruthManifest manifest, const Store& store, TaskName task, ScriptBehavior behavior = {});

  // Throws UnknownPatientInScript when the user message names no manifest id.
  ModelReply complete(const Conversation& conversation, const std::vector<FunctionSpec>& functions) override;

 private:
  const ManifestEntry& patient_of(const Conversation& conversation) const;
  ModelReply tier1(const ManifestEntry& entry, std::size_t turn) const;
  ModelReply orn(const ManifestEntry& entry, std::size_t turn, const Conversation& conversation) const;
  ModelReply recurrence(const ManifestEntry& entry, std::size_t turn) const;

  TruthManifest manifest_;
  const Store& store_;
  TaskName task_;
  ScriptBehavior behavior_;
};

}  // namespace labelflow
