#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace eventflow {

/// Calendar date in the single configured local zone.
using Date = std::chrono::sys_days;
/// Local wall-clock time with second resolution. No zone conversion is done
/// anywhere in the library; `sys_seconds` is used as a naive local clock.
using DateTime = std::chrono::sys_seconds;

Date make_date(int year, unsigned month, unsigned day);
DateTime make_datetime(int year, unsigned month, unsigned day, int hour = 0, int minute = 0, int second = 0);

/// Strict "YYYY-MM-DD". Returns nullopt on any deviation or invalid date.
std::optional<Date> try_parse_date(std::string_view text);
/// Strict "YYYY-MM-DD hh:mm:ss" (a 'T' separator is also accepted).
std::optional<DateTime> try_parse_datetime(std::string_view text);

/// Throwing variants used by file readers; errors are IoError.
Date parse_date(std::string_view text);
DateTime parse_datetime(std::string_view text);

std::string format_date(Date d);
/// "YYYY-MM-DD hh:mm:ss" by default; `iso_t` switches to the ISO-8601 'T' form.
std::string format_datetime(DateTime t, bool iso_t = false);

inline Date day_of(DateTime t) { return std::chrono::floor<std::chrono::days>(t); }

/// Monday = 0 ... Sunday = 6.
int weekday_index(Date d);
inline bool is_weekend(Date d) { return weekday_index(d) >= 5; }

/// Calendar-month shift, clamping the day to the end of the target month.
DateTime add_months(DateTime t, int months);

}  // namespace eventflow
