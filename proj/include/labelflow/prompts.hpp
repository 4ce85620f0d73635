#pragma once

#include <string_view>

namespace labelflow::prompts {

// Task instructions fed to the agent, one per task. Each contains the
// "{patient_id}" placeholder exactly once.
extern const std::string_view kTier1QaTemplate;
extern const std::string_view kOrnTemplate;
extern const std::string_view kRecurrenceTemplate;

}  // namespace labelflow::prompts
