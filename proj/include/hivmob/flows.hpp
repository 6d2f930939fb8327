#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hivmob/hierarchy.hpp"
#include "hivmob/matrix.hpp"
#include "hivmob/records.hpp"
#include "hivmob/trajectory_index.hpp"

namespace hivmob {

/// Hour-of-day window [begin_hour, end_hour) and optional day type. Default accepts everything.
struct TimeFilter {
  int begin_hour = 0;
  int end_hour = 24;
  std::optional<DayType> day_type;

  bool accepts(Timestamp t) const;
  bool unrestricted() const { return begin_hour == 0 && end_hour == 24 && !day_type; }
  /// "all", "h01-05", "we", "we:h01-05", ...
  std::string describe() const;

  /// Inverse of describe().
  static std::optional<TimeFilter> parse(std::string_view s);
  static TimeFilter night();
};

enum class FlowKind { communication, mobility };

struct FlowMatrix {
  FlowKind kind = FlowKind::communication;
  TimeFilter filter;
  std::optional<double> min_stay_days;
  std::vector<DeptId> departments;  // row/column labels, hierarchy order
  Matrix values;
  std::size_t excluded = 0;  // records that could not be resolved
};

struct HomeAssignment {
  std::vector<std::string> users;  // sorted, aligned with TrajectoryIndex users
  std::vector<std::size_t> home;   // department index
  std::vector<bool> tie_broken;    // several departments shared the top count

  /// Users homed in each department.
  std::vector<double> residents(std::size_t n_departments) const;
};

struct Stay {
  std::string user_id;
  std::size_t department = 0;  // department index
  Timestamp start;
  Timestamp end;

  double duration_days() const { return static_cast<double>(end.sec - start.sec) / kSecondsPerDay; }
};

/// Most frequent department per user; ties go to the smallest department id.
HomeAssignment infer_home(const TrajectoryIndex& index, const SpatialHierarchy& h);

FlowMatrix comm_flow(std::span<const AntennaRecord> records, const SpatialHierarchy& h,
                     const TimeFilter& filter = {});

/// Maximal runs of consecutive points in one non-home department.
std::vector<Stay> detect_stays(const TrajectoryIndex& index, const HomeAssignment& homes);

/// One unit per stay on (home, destination); with a threshold only stays longer than it count.
FlowMatrix mobility_flow(const TrajectoryIndex& index, const HomeAssignment& homes, const SpatialHierarchy& h,
                         std::optional<double> min_stay_days = std::nullopt);
FlowMatrix mobility_flow(std::span<const Stay> stays, const HomeAssignment& homes, const SpatialHierarchy& h,
                         std::optional<double> min_stay_days = std::nullopt);

/// Row a divided by pops[a]. Throws ConfigError for a non-positive population on a nonzero row.
FlowMatrix normalize_flows(const FlowMatrix& m, std::span<const double> pops);

/// out(a,b) = m(a,b) + m(b,a), zero diagonal.
FlowMatrix pair_strength(const FlowMatrix& m);

std::string_view to_string(FlowKind k);

/// TSV with a header row and column of department ids; metadata in '#' comment lines.
void write_flow_tsv(std::ostream& out, const FlowMatrix& m, std::string_view manifest_hash = {});
FlowMatrix read_flow_tsv(std::istream& in);

}  // namespace hivmob
