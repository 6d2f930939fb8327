#pragma once

#include <span>
#include <string>
#include <vector>

#include "hivmob/hierarchy.hpp"
#include "hivmob/records.hpp"

namespace hivmob {

enum class ViolationKind { unknown_antenna, unknown_subpref, outside_window };

std::string_view to_string(ViolationKind k);

struct Violation {
  std::size_t record = 0;  // index into the validated sequence
  ViolationKind kind;
  std::string detail;
};

struct ValidationReport {
  std::size_t checked = 0;
  std::vector<Violation> violations;
  std::vector<bool> valid;  // per record
  std::size_t affected = 0; // records with at least one violation

  bool clean() const { return violations.empty(); }
  /// Accepted when clean, or when the caller opted into dropping invalid records.
  bool accepted(bool drop_invalid) const { return clean() || drop_invalid; }
};

ValidationReport validate_dataset(std::span<const AntennaRecord> records, const SpatialHierarchy& h,
                                  TimeWindow window);
ValidationReport validate_dataset(std::span<const TrajectoryRecord> records, const SpatialHierarchy& h,
                                  TimeWindow window);

/// Keeps only the records the report marks valid.
template <typename Record>
std::vector<Record> drop_invalid(std::span<const Record> records, const ValidationReport& report) {
  std::vector<Record> out;
  out.reserve(records.size() - report.affected);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (report.valid[i]) out.push_back(records[i]);
  }
  return out;
}

}  // namespace hivmob
