#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace labelflow {

using Date = std::chrono::sys_days;
using DateTime = std::chrono::sys_seconds;

// ISO-8601 calendar date, "YYYY-MM-DD". Returns nullopt on anything else,
// including impossible dates such as 2021-02-30.
std::optional<Date> parse_date(std::string_view text);

// "YYYY-MM-DDTHH:MM:SS" (a space is accepted in place of 'T').
std::optional<DateTime> parse_datetime(std::string_view text);

std::string format_date(Date d);
std::string format_datetime(DateTime t);

inline DateTime start_of(Date d) { return std::chrono::time_point_cast<std::chrono::seconds>(d); }

}  // namespace labelflow
