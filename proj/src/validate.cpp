#include "hivmob/validate.hpp"

namespace hivmob {

std::string_view to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::unknown_antenna: return "unknown_antenna";
    case ViolationKind::unknown_subpref: return "unknown_subpref";
    case ViolationKind::outside_window: return "outside_window";
  }
  return "unknown";
}

namespace {

void begin(ValidationReport& r, std::size_t n) {
  r.checked = n;
  r.valid.assign(n, true);
}

void flag(ValidationReport& r, std::size_t i, ViolationKind k, std::string detail) {
  if (r.valid[i]) {
    r.valid[i] = false;
    ++r.affected;
  }
  r.violations.push_back({i, k, std::move(detail)});
}

}  // namespace

ValidationReport validate_dataset(std::span<const AntennaRecord> records, const SpatialHierarchy& h,
                                  TimeWindow window) {
  ValidationReport report;
  begin(report, records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!h.antenna_index(r.origin)) {
      flag(report, i, ViolationKind::unknown_antenna, "origin antenna " + std::to_string(r.origin));
    }
    if (!h.antenna_index(r.dest)) {
      flag(report, i, ViolationKind::unknown_antenna, "destination antenna " + std::to_string(r.dest));
    }
    if (!window.contains(r.hour_start)) {
      flag(report, i, ViolationKind::outside_window, format_hour_stamp(r.hour_start));
    }
  }
  return report;
}

ValidationReport validate_dataset(std::span<const TrajectoryRecord> records, const SpatialHierarchy& h,
                                  TimeWindow window) {
  ValidationReport report;
  begin(report, records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!h.subpref_index(r.subpref)) {
      flag(report, i, ViolationKind::unknown_subpref, "sub-prefecture " + std::to_string(r.subpref));
    }
    if (!window.contains(r.at)) {
      flag(report, i, ViolationKind::outside_window, format_timestamp(r.at));
    }
  }
  return report;
}

}  // namespace hivmob
