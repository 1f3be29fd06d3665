#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace launchpulse {

/// UTC instant at one-second resolution. Every timestamp in the pipeline is one of these.
using Timestamp = std::chrono::sys_seconds;

/// Parses ISO-8601 UTC instants: `YYYY-MM-DDTHH:MM:SS[.fff]Z` or with a `+00:00` offset.
/// Fractional seconds are truncated.
std::optional<Timestamp> try_parse_timestamp(std::string_view text);

/// Throws std::invalid_argument on malformed input.
Timestamp parse_timestamp(std::string_view text);

/// Parses `YYYY-MM-DD` as midnight UTC of that day.
Timestamp parse_date(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);

/// `YYYY-MM-DD`.
std::string format_date(Timestamp t);

Timestamp from_unix(long long seconds);
long long to_unix(Timestamp t);

int hour_of_day(Timestamp t);

/// Monday = 0 ... Sunday = 6.
int day_of_week(Timestamp t);

}  // namespace launchpulse
