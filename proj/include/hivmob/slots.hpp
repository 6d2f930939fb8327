#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "hivmob/time.hpp"

namespace hivmob {

/// A time-of-day slot: one of 24 one-hour slots, 3 eight-hour slots, or the whole day.
struct Slot {
  enum class Kind : std::uint8_t { hour, eight_hour, whole_day };
  Kind kind = Kind::whole_day;
  int index = 0;  // hour (0..23) or eight-hour block (0..2)

  int first_hour() const;
  int end_hour() const;  // exclusive
  bool contains(int hour) const { return hour >= first_hour() && hour < end_hour(); }
  /// "h00".."h23", "s00_08", "s08_16", "s16_24", "day"
  std::string suffix() const;
};

inline constexpr std::size_t kSlotsPerDayType = 28;

/// Hour slots first, then eight-hour slots, then the whole day.
const std::array<Slot, kSlotsPerDayType>& slot_scheme();

/// Slots a given hour falls into: its hour slot, its eight-hour slot, the whole day.
std::array<std::size_t, 3> slots_of_hour(int hour);

std::string_view day_type_tag(DayType t);  // "wd" / "we"
std::optional<DayType> parse_day_type_tag(std::string_view s);
std::optional<std::size_t> parse_slot_suffix(std::string_view s);

/// Night window used throughout: [01:00, 05:00).
inline constexpr int kNightBegin = 1;
inline constexpr int kNightEnd = 5;
inline bool is_night_hour(int hour) { return hour >= kNightBegin && hour < kNightEnd; }

}  // namespace hivmob
