#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace crisis {

/// UTC instant with millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

Timestamp now_utc();

/// RFC-3339 in UTC with millisecond precision, e.g. "2024-03-01T08:15:00.250Z".
std::string format_rfc3339(Timestamp t);

/// Accepts "Z" or "+HH:MM"/"-HH:MM" offsets and optional fractional seconds.
/// Throws ParseError on malformed input.
Timestamp parse_rfc3339(std::string_view text);

}  // namespace crisis
