#include "hivmob/graph_export.hpp"

#include <cstdio>
#include <optional>
#include <ostream>

#include "json.hpp"

#include "hivmob/numfmt.hpp"

namespace hivmob {

std::string prevalence_label(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * fraction);
  return buf;
}

namespace {

std::optional<double> prevalence_of(std::span<const HivEstimate> est, DeptId id) {
  for (const auto& e : est) {
    if (e.department == id) return e.prevalence;
  }
  return std::nullopt;
}

}  // namespace

void write_tie_dot(std::ostream& out, const TieSet& ties, const SpatialHierarchy& h,
                   std::span<const HivEstimate> prevalence, std::string_view manifest_hash) {
  out << "digraph ties {\n";
  if (!manifest_hash.empty()) out << "  // manifest=" << manifest_hash << '\n';
  for (std::size_t a = 0; a < ties.departments.size(); ++a) {
    DeptId id = ties.departments[a];
    out << "  d" << id << " [";
    if (auto d = h.department_index(id)) {
      const auto& c = h.departments()[*d].centroid;
      out << "pos=\"" << format_double(c.x) << ',' << format_double(c.y) << "!\", ";
    }
    auto p = prevalence_of(prevalence, id);
    out << "label=\"" << (p ? prevalence_label(*p) : std::to_string(id)) << "\"];\n";
  }
  for (std::size_t a = 0; a < ties.ties.size(); ++a) {
    for (const Tie& t : ties.ties[a]) {
      if (!t.strong) continue;
      out << "  d" << ties.departments[a] << " -> d" << ties.departments[t.peer]
          << " [weight=" << format_double(t.relative) << "];\n";
    }
  }
  out << "}\n";
}

void write_tie_geojson(std::ostream& out, const TieSet& ties, const SpatialHierarchy& h,
                       std::span<const HivEstimate> prevalence, std::string_view manifest_hash) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  if (!manifest_hash.empty()) doc["manifest"] = manifest_hash;
  doc["features"] = ordered_json::array();
  auto centroid = [&](DeptId id) -> std::optional<Point> {
    auto d = h.department_index(id);
    if (!d) return std::nullopt;
    return h.departments()[*d].centroid;
  };
  for (DeptId id : ties.departments) {
    auto c = centroid(id);
    if (!c) continue;
    ordered_json f;
    f["type"] = "Feature";
    f["properties"] = {{"dept", id}};
    if (auto p = prevalence_of(prevalence, id)) {
      f["properties"]["prevalence"] = *p;
      f["properties"]["label"] = prevalence_label(*p);
    }
    f["geometry"] = {{"type", "Point"}, {"coordinates", {c->x, c->y}}};
    doc["features"].push_back(std::move(f));
  }
  for (std::size_t a = 0; a < ties.ties.size(); ++a) {
    for (const Tie& t : ties.ties[a]) {
      if (!t.strong) continue;
      auto from = centroid(ties.departments[a]);
      auto to = centroid(ties.departments[t.peer]);
      if (!from || !to) continue;
      ordered_json f;
      f["type"] = "Feature";
      f["properties"] = {{"from", ties.departments[a]}, {"to", ties.departments[t.peer]},
                         {"relative_strength", t.relative}, {"strength", t.strength}};
      f["geometry"] = {{"type", "LineString"},
                       {"coordinates", ordered_json::array({{from->x, from->y}, {to->x, to->y}})}};
      doc["features"].push_back(std::move(f));
    }
  }
  out << doc.dump(1) << '\n';
}

}  // namespace hivmob
