#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace netsense {

// Calendar helpers for UTC instants, represented as seconds since the Unix epoch.
// Proleptic Gregorian; no leap seconds.

struct CivilTime {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31
    int hour = 0;
    int minute = 0;
    int second = 0;
};

std::int64_t days_from_civil(int year, int month, int day);
CivilTime civil_from_epoch(std::int64_t epoch_seconds);
std::int64_t epoch_from_civil(const CivilTime& ct);

// Accepts ISO-8601 ("2024-01-01T00:30:00Z", "2024-01-01T02:00:00+02:00",
// fractional seconds allowed and truncated) and the space-separated form
// "2024-01-01 00:30:00" which is taken as UTC. Returns nullopt when the text
// does not denote a valid instant.
std::optional<std::int64_t> parse_instant(const std::string& text);

std::string format_instant(std::int64_t epoch_seconds);

// Hour of day (0..23) of the given instant in UTC.
int utc_hour(std::int64_t epoch_seconds);

} // namespace netsense
