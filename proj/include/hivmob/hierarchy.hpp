#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hivmob/records.hpp"

namespace hivmob {

/// Planar coordinates in kilometres.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(Point, Point) = default;
};

struct AntennaInfo {
  AntennaId id = 0;
  Point pos;
  SubprefId subpref = 0;
};

struct SubprefInfo {
  SubprefId id = 0;
  DeptId department = 0;
  Point centroid;
};

struct DepartmentInfo {
  DeptId id = 0;
  RegionId region = 0;
  std::string name;
  Point centroid;
  std::vector<Point> polygon;  // simple polygon, implicit closing edge
};

class HierarchyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps a sparse id space onto dense indices [0, size).
class IdIndex {
 public:
  IdIndex() = default;
  explicit IdIndex(std::span<const std::uint32_t> sorted_ids);

  std::optional<std::size_t> find(std::uint32_t id) const;
  std::size_t size() const { return ids_.size(); }

 private:
  std::vector<std::uint32_t> ids_;
  std::vector<std::int32_t> dense_;  // empty when ids are too sparse
};

/// Antenna -> sub-prefecture -> department -> region. Entities are kept
/// sorted by id; "index" below always means the position in that order.
class SpatialHierarchy {
 public:
  SpatialHierarchy() = default;

  /// Validates closure of every lookup; throws HierarchyError.
  static SpatialHierarchy build(std::vector<AntennaInfo> antennas, std::vector<SubprefInfo> subprefs,
                                std::vector<DepartmentInfo> departments, std::vector<RegionId> regions);

  std::span<const AntennaInfo> antennas() const { return antennas_; }
  std::span<const SubprefInfo> subprefs() const { return subprefs_; }
  std::span<const DepartmentInfo> departments() const { return departments_; }
  std::span<const RegionId> regions() const { return regions_; }

  std::size_t department_count() const { return departments_.size(); }
  std::vector<DeptId> department_ids() const;

  std::optional<std::size_t> department_index(DeptId id) const { return dept_index_.find(id); }
  std::optional<std::size_t> antenna_index(AntennaId id) const { return antenna_index_.find(id); }
  std::optional<std::size_t> subpref_index(SubprefId id) const { return subpref_index_.find(id); }

  /// Department index of an antenna or sub-prefecture; nullopt for unknown ids.
  std::optional<std::size_t> department_of_antenna(AntennaId id) const;
  std::optional<std::size_t> department_of_subpref(SubprefId id) const;

  const SubprefInfo* find_subpref(SubprefId id) const;
  const AntennaInfo* find_antenna(AntennaId id) const;

  /// Department index containing p, or nullopt when p lies outside every polygon.
  std::optional<std::size_t> locate(Point p) const;

 private:
  std::vector<AntennaInfo> antennas_;
  std::vector<SubprefInfo> subprefs_;
  std::vector<DepartmentInfo> departments_;
  std::vector<RegionId> regions_;
  IdIndex antenna_index_;
  IdIndex subpref_index_;
  IdIndex dept_index_;
  std::vector<std::uint32_t> antenna_dept_;  // by antenna index
  std::vector<std::uint32_t> subpref_dept_;  // by subpref index
};

bool point_in_polygon(Point p, std::span<const Point> polygon);

/// Department populations rescaled to the number of subscribers.
class PopulationTable {
 public:
  PopulationTable() = default;
  PopulationTable(std::vector<std::pair<DeptId, double>> dept_pop, double user_scale);

  double user_scale() const { return user_scale_; }
  std::span<const std::pair<DeptId, double>> entries() const { return dept_pop_; }
  std::optional<double> population(DeptId id) const;

  /// Populations in hierarchy department order, rescaled so they sum to user_scale.
  /// Throws HierarchyError when a department has no population entry.
  std::vector<double> rescaled(const SpatialHierarchy& h) const;

 private:
  std::vector<std::pair<DeptId, double>> dept_pop_;  // sorted by id
  double user_scale_ = 0.0;
};

SpatialHierarchy read_hierarchy_json(std::istream& in);
void write_hierarchy_json(std::ostream& out, const SpatialHierarchy& h);
PopulationTable read_population_json(std::istream& in);
void write_population_json(std::ostream& out, const PopulationTable& p);

}  // namespace hivmob
