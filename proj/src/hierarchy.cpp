#include "hivmob/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace hivmob {

using nlohmann::json;

IdIndex::IdIndex(std::span<const std::uint32_t> sorted_ids) : ids_(sorted_ids.begin(), sorted_ids.end()) {
  if (ids_.empty()) return;
  std::uint32_t max_id = ids_.back();
  if (max_id <= 4 * ids_.size() + 4096) {
    dense_.assign(static_cast<std::size_t>(max_id) + 1, -1);
    for (std::size_t i = 0; i < ids_.size(); ++i) dense_[ids_[i]] = static_cast<std::int32_t>(i);
  }
}

std::optional<std::size_t> IdIndex::find(std::uint32_t id) const {
  if (!dense_.empty()) {
    if (id >= dense_.size() || dense_[id] < 0) return std::nullopt;
    return static_cast<std::size_t>(dense_[id]);
  }
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) return std::nullopt;
  return static_cast<std::size_t>(it - ids_.begin());
}

namespace {

template <typename T, typename IdFn>
IdIndex sort_and_index(std::vector<T>& items, IdFn id_of, const char* what) {
  std::sort(items.begin(), items.end(), [&](const T& a, const T& b) { return id_of(a) < id_of(b); });
  std::vector<std::uint32_t> ids;
  ids.reserve(items.size());
  for (const auto& it : items) {
    if (!ids.empty() && ids.back() == id_of(it)) {
      throw HierarchyError(std::string("duplicate ") + what + " id " + std::to_string(id_of(it)));
    }
    ids.push_back(id_of(it));
  }
  return IdIndex(ids);
}

}  // namespace

SpatialHierarchy SpatialHierarchy::build(std::vector<AntennaInfo> antennas,
                                         std::vector<SubprefInfo> subprefs,
                                         std::vector<DepartmentInfo> departments,
                                         std::vector<RegionId> regions) {
  SpatialHierarchy h;
  std::sort(regions.begin(), regions.end());
  if (std::adjacent_find(regions.begin(), regions.end()) != regions.end()) {
    throw HierarchyError("duplicate region id");
  }
  h.regions_ = std::move(regions);
  h.antennas_ = std::move(antennas);
  h.subprefs_ = std::move(subprefs);
  h.departments_ = std::move(departments);
  h.antenna_index_ = sort_and_index(h.antennas_, [](const AntennaInfo& a) { return a.id; }, "antenna");
  h.subpref_index_ = sort_and_index(h.subprefs_, [](const SubprefInfo& s) { return s.id; }, "sub-prefecture");
  h.dept_index_ = sort_and_index(h.departments_, [](const DepartmentInfo& d) { return d.id; }, "department");

  for (const auto& d : h.departments_) {
    if (!std::binary_search(h.regions_.begin(), h.regions_.end(), d.region)) {
      throw HierarchyError("department " + std::to_string(d.id) + " references unknown region " +
                           std::to_string(d.region));
    }
  }
  h.subpref_dept_.reserve(h.subprefs_.size());
  for (const auto& s : h.subprefs_) {
    auto di = h.dept_index_.find(s.department);
    if (!di) {
      throw HierarchyError("sub-prefecture " + std::to_string(s.id) + " references unknown department " +
                           std::to_string(s.department));
    }
    h.subpref_dept_.push_back(static_cast<std::uint32_t>(*di));
  }
  h.antenna_dept_.reserve(h.antennas_.size());
  for (const auto& a : h.antennas_) {
    auto si = h.subpref_index_.find(a.subpref);
    if (!si) {
      throw HierarchyError("antenna " + std::to_string(a.id) + " references unknown sub-prefecture " +
                           std::to_string(a.subpref));
    }
    h.antenna_dept_.push_back(h.subpref_dept_[*si]);
  }
  return h;
}

std::vector<DeptId> SpatialHierarchy::department_ids() const {
  std::vector<DeptId> ids;
  ids.reserve(departments_.size());
  for (const auto& d : departments_) ids.push_back(d.id);
  return ids;
}

std::optional<std::size_t> SpatialHierarchy::department_of_antenna(AntennaId id) const {
  auto i = antenna_index_.find(id);
  if (!i) return std::nullopt;
  return antenna_dept_[*i];
}

std::optional<std::size_t> SpatialHierarchy::department_of_subpref(SubprefId id) const {
  auto i = subpref_index_.find(id);
  if (!i) return std::nullopt;
  return subpref_dept_[*i];
}

const SubprefInfo* SpatialHierarchy::find_subpref(SubprefId id) const {
  auto i = subpref_index_.find(id);
  return i ? &subprefs_[*i] : nullptr;
}

const AntennaInfo* SpatialHierarchy::find_antenna(AntennaId id) const {
  auto i = antenna_index_.find(id);
  return i ? &antennas_[*i] : nullptr;
}

std::optional<std::size_t> SpatialHierarchy::locate(Point p) const {
  for (std::size_t i = 0; i < departments_.size(); ++i) {
    if (point_in_polygon(p, departments_[i].polygon)) return i;
  }
  return std::nullopt;
}

// Half-open crossing rule: points on a shared left/bottom edge belong to exactly one
// of two adjacent axis-aligned cells.
bool point_in_polygon(Point p, std::span<const Point> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

PopulationTable::PopulationTable(std::vector<std::pair<DeptId, double>> dept_pop, double user_scale)
    : dept_pop_(std::move(dept_pop)), user_scale_(user_scale) {
  std::sort(dept_pop_.begin(), dept_pop_.end());
  for (std::size_t i = 0; i < dept_pop_.size(); ++i) {
    if (i > 0 && dept_pop_[i].first == dept_pop_[i - 1].first) {
      throw HierarchyError("duplicate population entry for department " + std::to_string(dept_pop_[i].first));
    }
    if (!(dept_pop_[i].second > 0.0) || !std::isfinite(dept_pop_[i].second)) {
      throw HierarchyError("population of department " + std::to_string(dept_pop_[i].first) +
                           " must be positive");
    }
  }
  if (!(user_scale_ > 0.0)) throw HierarchyError("user_scale must be positive");
}

std::optional<double> PopulationTable::population(DeptId id) const {
  auto it = std::lower_bound(dept_pop_.begin(), dept_pop_.end(), std::make_pair(id, -1.0));
  if (it == dept_pop_.end() || it->first != id) return std::nullopt;
  return it->second;
}

std::vector<double> PopulationTable::rescaled(const SpatialHierarchy& h) const {
  std::vector<double> raw;
  raw.reserve(h.department_count());
  for (const auto& d : h.departments()) {
    auto p = population(d.id);
    if (!p) throw HierarchyError("no population for department " + std::to_string(d.id));
    raw.push_back(*p);
  }
  double total = std::accumulate(raw.begin(), raw.end(), 0.0);
  for (double& v : raw) v = v * user_scale_ / total;
  return raw;
}

namespace {

json point_json(Point p) { return json::array({p.x, p.y}); }

Point point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw HierarchyError("coordinate must be a [x, y] array");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

SpatialHierarchy read_hierarchy_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
    std::vector<RegionId> regions = doc.at("regions").get<std::vector<RegionId>>();
    std::vector<DepartmentInfo> depts;
    for (const auto& d : doc.at("departments")) {
      DepartmentInfo info;
      info.id = d.at("id").get<DeptId>();
      info.region = d.at("region").get<RegionId>();
      info.name = d.value("name", std::string{});
      info.centroid = point_from(d.at("centroid"));
      for (const auto& p : d.at("polygon")) info.polygon.push_back(point_from(p));
      depts.push_back(std::move(info));
    }
    std::vector<SubprefInfo> subprefs;
    for (const auto& s : doc.at("subprefs")) {
      subprefs.push_back({s.at("id").get<SubprefId>(), s.at("department").get<DeptId>(),
                          point_from(s.at("centroid"))});
    }
    std::vector<AntennaInfo> antennas;
    for (const auto& a : doc.at("antennas")) {
      antennas.push_back({a.at("id").get<AntennaId>(), point_from(a.at("pos")), a.at("subpref").get<SubprefId>()});
    }
    return SpatialHierarchy::build(std::move(antennas), std::move(subprefs), std::move(depts),
                                   std::move(regions));
  } catch (const json::exception& e) {
    throw HierarchyError(std::string("hierarchy JSON: ") + e.what());
  }
}

void write_hierarchy_json(std::ostream& out, const SpatialHierarchy& h) {
  json doc;
  doc["regions"] = std::vector<RegionId>(h.regions().begin(), h.regions().end());
  json depts = json::array();
  for (const auto& d : h.departments()) {
    json poly = json::array();
    for (const auto& p : d.polygon) poly.push_back(point_json(p));
    depts.push_back({{"id", d.id}, {"region", d.region}, {"name", d.name},
                     {"centroid", point_json(d.centroid)}, {"polygon", std::move(poly)}});
  }
  doc["departments"] = std::move(depts);
  json subprefs = json::array();
  for (const auto& s : h.subprefs()) {
    subprefs.push_back({{"id", s.id}, {"department", s.department}, {"centroid", point_json(s.centroid)}});
  }
  doc["subprefs"] = std::move(subprefs);
  json antennas = json::array();
  for (const auto& a : h.antennas()) {
    antennas.push_back({{"id", a.id}, {"subpref", a.subpref}, {"pos", point_json(a.pos)}});
  }
  doc["antennas"] = std::move(antennas);
  out << doc.dump(1) << '\n';
}

PopulationTable read_population_json(std::istream& in) {
  try {
    json doc = json::parse(in);
    std::vector<std::pair<DeptId, double>> pops;
    for (const auto& d : doc.at("departments")) {
      pops.emplace_back(d.at("id").get<DeptId>(), d.at("population").get<double>());
    }
    return PopulationTable(std::move(pops), doc.at("user_scale").get<double>());
  } catch (const json::exception& e) {
    throw HierarchyError(std::string("population JSON: ") + e.what());
  }
}

void write_population_json(std::ostream& out, const PopulationTable& p) {
  json depts = json::array();
  for (const auto& [id, pop] : p.entries()) depts.push_back({{"id", id}, {"population", pop}});
  json doc{{"user_scale", p.user_scale()}, {"departments", std::move(depts)}};
  out << doc.dump(1) << '\n';
}

}  // namespace hivmob
