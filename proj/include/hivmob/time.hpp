#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hivmob {

/// Seconds since the Unix epoch, UTC.
struct Timestamp {
  std::int64_t sec = 0;

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
};

constexpr std::int64_t kSecondsPerHour = 3600;
constexpr std::int64_t kSecondsPerDay = 86400;

enum class DayType : std::uint8_t { weekday = 0, weekend = 1 };

/// Half-open interval [begin, end).
struct TimeWindow {
  Timestamp begin;
  Timestamp end;

  bool contains(Timestamp t) const { return begin <= t && t < end; }
};

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                         int second = 0);

/// 2011-12-01 00:00 through the end of 2012-04-28.
TimeWindow default_observation_window();

int hour_of_day(Timestamp t);
std::int64_t day_index(Timestamp t);  // days since epoch, floor
DayType day_type(Timestamp t);        // Saturday and Sunday are weekend

/// "YYYY-MM-DDTHH" (hour resolution, as in the antenna traffic files).
std::optional<Timestamp> parse_hour_stamp(std::string_view s);
std::string format_hour_stamp(Timestamp t);

/// "YYYY-MM-DDTHH:MM:SS"; coarser "YYYY-MM-DDTHH:MM", "YYYY-MM-DDTHH" and
/// "YYYY-MM-DD" are accepted and truncate to the missing fields.
std::optional<Timestamp> parse_timestamp(std::string_view s);
std::string format_timestamp(Timestamp t);

/// Parses either an ISO date ("2011-12-01") or a full timestamp.
std::optional<Timestamp> parse_date_or_timestamp(std::string_view s);

}  // namespace hivmob
