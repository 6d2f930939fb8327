#include "hivmob/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace hivmob {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool read_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc{} && ptr == s.data() + pos + len;
}

std::optional<Timestamp> build(int y, int mo, int d, int h, int mi, int se) {
  using namespace std::chrono;
  if (mo < 1 || mo > 12 || d < 1 || h < 0 || h > 23 || mi < 0 || mi > 59 || se < 0 || se > 59) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return make_timestamp(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, se);
}

}  // namespace

Timestamp make_timestamp(int year, unsigned month, unsigned day, int hour, int minute, int second) {
  using namespace std::chrono;
  sys_days days{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
  return Timestamp{static_cast<std::int64_t>(days.time_since_epoch().count()) * kSecondsPerDay +
                   hour * kSecondsPerHour + minute * 60 + second};
}

TimeWindow default_observation_window() {
  return {make_timestamp(2011, 12, 1), make_timestamp(2012, 4, 29)};
}

int hour_of_day(Timestamp t) {
  std::int64_t r = t.sec - floor_div(t.sec, kSecondsPerDay) * kSecondsPerDay;
  return static_cast<int>(r / kSecondsPerHour);
}

std::int64_t day_index(Timestamp t) { return floor_div(t.sec, kSecondsPerDay); }

DayType day_type(Timestamp t) {
  using namespace std::chrono;
  weekday wd{sys_days{days{day_index(t)}}};
  return (wd == Saturday || wd == Sunday) ? DayType::weekend : DayType::weekday;
}

std::optional<Timestamp> parse_hour_stamp(std::string_view s) {
  int y, mo, d, h;
  if (s.size() != 13 || s[4] != '-' || s[7] != '-' || s[10] != 'T') return std::nullopt;
  if (!read_fixed(s, 0, 4, y) || !read_fixed(s, 5, 2, mo) || !read_fixed(s, 8, 2, d) ||
      !read_fixed(s, 11, 2, h)) {
    return std::nullopt;
  }
  return build(y, mo, d, h, 0, 0);
}

std::string format_hour_stamp(Timestamp t) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{days{day_index(t)}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hour_of_day(t));
  return buf;
}

std::optional<Timestamp> parse_timestamp(std::string_view s) {
  int y, mo, d, h = 0, mi = 0, se = 0;
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  if (!read_fixed(s, 0, 4, y) || !read_fixed(s, 5, 2, mo) || !read_fixed(s, 8, 2, d)) {
    return std::nullopt;
  }
  if (s.size() == 10) return build(y, mo, d, 0, 0, 0);
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  if (s.size() == 13) {
    if (!read_fixed(s, 11, 2, h)) return std::nullopt;
  } else if (s.size() == 16) {
    if (!read_fixed(s, 11, 2, h) || s[13] != ':' || !read_fixed(s, 14, 2, mi)) return std::nullopt;
  } else if (s.size() == 19) {
    if (!read_fixed(s, 11, 2, h) || s[13] != ':' || !read_fixed(s, 14, 2, mi) || s[16] != ':' ||
        !read_fixed(s, 17, 2, se)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }
  return build(y, mo, d, h, mi, se);
}

std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{days{day_index(t)}}};
  std::int64_t r = t.sec - day_index(t) * kSecondsPerDay;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(r / 3600), static_cast<int>((r / 60) % 60), static_cast<int>(r % 60));
  return buf;
}

std::optional<Timestamp> parse_date_or_timestamp(std::string_view s) { return parse_timestamp(s); }

}  // namespace hivmob
