#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace conman {

// UTC seconds since the Unix epoch.
using Timestamp = std::int64_t;
// Seconds.
using Duration = std::int64_t;

inline constexpr Duration kMinute = 60;
inline constexpr Duration kHour = 3600;
inline constexpr Duration kDay = 86400;

// "2022-10-14T00:00:00Z"
std::string to_iso8601(Timestamp t);
// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SSZ" and "YYYY-MM-DD HH:MM:SS".
Timestamp parse_iso8601(std::string_view s);

// Whole days between two instants, floored.
constexpr std::int64_t whole_days(Timestamp from, Timestamp to) {
  const Duration d = to - from;
  return d >= 0 ? d / kDay : -((-d + kDay - 1) / kDay);
}

}  // namespace conman
