#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace cascade::timeutil {

// Seconds since the Unix epoch, UTC. Fractional seconds preserved.
// Accepts "YYYY-MM-DD", "YYYY-MM-DD[T ]HH:MM[:SS[.fff]]" with an optional
// trailing "Z" or "+HH:MM"/"-HH:MM" offset. Anything else is a ParseError.
double parse_iso8601(std::string_view text);

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(int year, unsigned month, unsigned day);

struct CivilDate {
    int year;
    unsigned month; // 1..12
    unsigned day;   // 1..31
};
CivilDate civil_from_days(std::int64_t days);

std::string format_date(double epoch_seconds);  // "YYYY-MM-DD"
std::string format_month(double epoch_seconds); // "YYYY-MM"

int hour_of_day(double epoch_seconds);  // 0..23, UTC
int hour_of_week(double epoch_seconds); // 0..167, Monday 00:00 == 0

} // namespace cascade::timeutil
