#include "conman/time.hpp"

#include <chrono>
#include <cstdio>

#include <fmt/format.h>

#include "conman/error.hpp"

namespace conman {

std::string to_iso8601(Timestamp t) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                     hms.hours().count(), hms.minutes().count(), hms.seconds().count());
}

Timestamp parse_iso8601(std::string_view s) {
  using namespace std::chrono;
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  const std::string buf(s);
  int n = std::sscanf(buf.c_str(), "%d-%u-%u%*[T ]%u:%u:%u", &y, &mo, &d, &h, &mi, &sec);
  if (n != 3 && n != 6) {
    throw ValidationError(fmt::format("bad timestamp '{}'", s));
  }
  const year_month_day ymd{year{y}, month{mo}, day{d}};
  if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) {
    throw ValidationError(fmt::format("bad timestamp '{}'", s));
  }
  const sys_days sd{ymd};
  return sd.time_since_epoch().count() * kDay + h * kHour + mi * kMinute + sec;
}

}  // namespace conman
