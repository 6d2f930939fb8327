#include "hivmob/slots.hpp"

#include <cstdio>

namespace hivmob {

int Slot::first_hour() const {
  switch (kind) {
    case Kind::hour: return index;
    case Kind::eight_hour: return index * 8;
    case Kind::whole_day: return 0;
  }
  return 0;
}

int Slot::end_hour() const {
  switch (kind) {
    case Kind::hour: return index + 1;
    case Kind::eight_hour: return index * 8 + 8;
    case Kind::whole_day: return 24;
  }
  return 24;
}

std::string Slot::suffix() const {
  char buf[16];
  switch (kind) {
    case Kind::hour: std::snprintf(buf, sizeof buf, "h%02d", index); break;
    case Kind::eight_hour: std::snprintf(buf, sizeof buf, "s%02d_%02d", first_hour(), end_hour()); break;
    case Kind::whole_day: return "day";
  }
  return buf;
}

const std::array<Slot, kSlotsPerDayType>& slot_scheme() {
  static const std::array<Slot, kSlotsPerDayType> scheme = [] {
    std::array<Slot, kSlotsPerDayType> s{};
    for (int h = 0; h < 24; ++h) s[static_cast<std::size_t>(h)] = {Slot::Kind::hour, h};
    for (int b = 0; b < 3; ++b) s[24 + static_cast<std::size_t>(b)] = {Slot::Kind::eight_hour, b};
    s[27] = {Slot::Kind::whole_day, 0};
    return s;
  }();
  return scheme;
}

std::array<std::size_t, 3> slots_of_hour(int hour) {
  return {static_cast<std::size_t>(hour), 24 + static_cast<std::size_t>(hour / 8), 27};
}

std::string_view day_type_tag(DayType t) { return t == DayType::weekday ? "wd" : "we"; }

std::optional<DayType> parse_day_type_tag(std::string_view s) {
  if (s == "wd") return DayType::weekday;
  if (s == "we") return DayType::weekend;
  return std::nullopt;
}

std::optional<std::size_t> parse_slot_suffix(std::string_view s) {
  const auto& scheme = slot_scheme();
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    if (scheme[i].suffix() == s) return i;
  }
  return std::nullopt;
}

}  // namespace hivmob
