#include "hivmob/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "hivmob/errors.hpp"
#include "hivmob/geometry.hpp"
#include "hivmob/numfmt.hpp"
#include "hivmob/parallel.hpp"
#include "hivmob/slots.hpp"

namespace hivmob {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::connectivity: return "connectivity";
    case Family::spatial: return "spatial";
    case Family::migration: return "migration";
    case Family::activity: return "activity";
  }
  return "activity";
}

std::optional<Family> parse_family(std::string_view s) {
  for (Family f : kFamilies) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::optional<Family> family_of(std::string_view name) {
  if (name.starts_with("conn_")) return Family::connectivity;
  if (name.starts_with("spat_")) return Family::spatial;
  if (name.starts_with("mig_")) return Family::migration;
  if (name.starts_with("act_")) return Family::activity;
  return std::nullopt;
}

std::optional<std::size_t> FeatureMatrix::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> FeatureMatrix::family_columns(Family f) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].family == f) out.push_back(i);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> cols) const {
  FeatureMatrix out;
  out.departments = departments;
  for (std::size_t c : cols) out.columns.push_back(columns.at(c));
  out.values = values.select_cols(cols);
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  for (std::size_t r : rows) out.departments.push_back(departments.at(r));
  out.columns = columns;
  out.values = values.select_rows(rows);
  return out;
}

FeatureMatrix concat_columns(std::span<const FeatureMatrix> parts) {
  FeatureMatrix out;
  if (parts.empty()) return out;
  out.departments = parts[0].departments;
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p.departments != out.departments) throw ConfigError("feature blocks have different rows");
    cols += p.columns.size();
  }
  out.values = Matrix(out.departments.size(), cols);
  std::size_t at = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < out.departments.size(); ++r) {
      std::copy(p.values.row(r).begin(), p.values.row(r).end(), out.values.row(r).begin() + static_cast<std::ptrdiff_t>(at));
    }
    out.columns.insert(out.columns.end(), p.columns.begin(), p.columns.end());
    at += p.columns.size();
  }
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double h = (static_cast<double>(values.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<double> resident_counts(const HomeAssignment& homes, std::size_t n_departments) {
  return homes.residents(n_departments);
}

namespace {

FeatureMatrix blank(const SpatialHierarchy& h, std::size_t cols) {
  FeatureMatrix m;
  m.departments = h.department_ids();
  m.values = Matrix(h.department_count(), cols);
  m.columns.reserve(cols);
  return m;
}

std::string slot_name(DayType t, std::size_t slot) {
  return std::string(day_type_tag(t)) + "_" + slot_scheme()[slot].suffix();
}

// Divides each row by its denominator; rows with a zero denominator stay zero.
void divide_rows(Matrix& m, std::span<const double> denom, std::size_t first_col, std::size_t n_cols) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = first_col; c < first_col + n_cols; ++c) {
      m(r, c) = denom[r] > 0.0 ? m(r, c) / denom[r] : 0.0;
    }
  }
}

std::string zero_denominator_note(std::span<const double> denom, const std::vector<DeptId>& ids) {
  std::string note;
  for (std::size_t r = 0; r < denom.size(); ++r) {
    if (denom[r] > 0.0) continue;
    note += note.empty() ? "zero population: " : ",";
    note += std::to_string(ids[r]);
  }
  return note;
}

constexpr std::array<const char*, 4> kScopes{"inner", "orig", "term", "overall"};

}  // namespace

FeatureMatrix connectivity_features(std::span<const AntennaRecord> records, const SpatialHierarchy& h,
                                    std::span<const double> populations) {
  const std::size_t D = h.department_count();
  if (populations.size() != D) throw ConfigError("one population per department required");
  constexpr std::size_t kHalf = 4 + 2 * kSlotsPerDayType;  // 60
  // Per department: calls and seconds per column, columns laid out as the count half.
  Matrix calls(D, kHalf), secs(D, kHalf);
  auto add = [&](std::size_t d, std::size_t col, const AntennaRecord& r) {
    calls(d, col) += static_cast<double>(r.n_calls);
    secs(d, col) += r.total_duration;
  };
  for (const auto& r : records) {
    auto a = h.department_of_antenna(r.origin);
    auto b = h.department_of_antenna(r.dest);
    if (!a || !b) continue;
    if (*a == *b) add(*a, 0, r);
    add(*a, 1, r);
    add(*b, 2, r);
    const auto t = static_cast<std::size_t>(day_type(r.hour_start));
    const auto slots = slots_of_hour(hour_of_day(r.hour_start));
    for (std::size_t d : {*a, *b}) {
      add(d, 3, r);
      for (std::size_t s : slots) add(d, 4 + t * kSlotsPerDayType + s, r);
      if (*a == *b) break;
    }
  }

  FeatureMatrix m = blank(h, 2 * kHalf);
  std::vector<std::string> names, slots;
  for (const char* s : kScopes) {
    names.emplace_back(s);
    slots.emplace_back();
  }
  for (DayType t : {DayType::weekday, DayType::weekend}) {
    for (std::size_t s = 0; s < kSlotsPerDayType; ++s) {
      names.push_back(slot_name(t, s));
      slots.push_back(slot_name(t, s));
    }
  }
  const std::string pop_note = zero_denominator_note(populations, m.departments);
  for (std::size_t c = 0; c < kHalf; ++c) {
    m.columns.push_back({"conn_calls_" + names[c], Family::connectivity, slots[c], "per rescaled population",
                         pop_note});
    for (std::size_t d = 0; d < D; ++d) {
      m.values(d, c) = populations[d] > 0.0 ? calls(d, c) / populations[d] : 0.0;
    }
  }
  for (std::size_t c = 0; c < kHalf; ++c) {
    FeatureColumn col{"conn_dur_" + names[c], Family::connectivity, slots[c], "mean seconds per call", ""};
    double sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t d = 0; d < D; ++d) {
      if (calls(d, c) > 0.0) {
        sum += secs(d, c) / calls(d, c);
        ++defined;
      }
    }
    const double fill = defined > 0 ? sum / static_cast<double>(defined) : 0.0;
    std::size_t imputed = 0;
    for (std::size_t d = 0; d < D; ++d) {
      if (calls(d, c) > 0.0) {
        m.values(d, kHalf + c) = secs(d, c) / calls(d, c);
      } else {
        m.values(d, kHalf + c) = fill;
        ++imputed;
      }
    }
    if (imputed > 0) col.note = "imputed column mean for " + std::to_string(imputed) + " departments";
    m.columns.push_back(std::move(col));
  }
  return m;
}

namespace {

enum Subset : std::size_t { kAll, kNight, kWd, kWe, kWdNight, kWeNight, kSubsets };
constexpr std::array<const char*, kSubsets> kSubsetNames{"all", "night", "wd", "we", "wdnight", "wenight"};
constexpr std::array<const char*, 4> kMetricNames{"gyr", "area", "perim", "diam"};

}  // namespace

FeatureMatrix spatial_features(const TrajectoryIndex& index, const HomeAssignment& homes, const SpatialHierarchy& h) {
  const std::size_t D = h.department_count();
  const std::size_t U = index.user_count();
  constexpr std::size_t kCols = 4 * kSubsets + 1;
  // Per user: 24 metrics + total distance; home department or npos.
  Matrix per_user(U, kCols);
  std::vector<std::size_t> user_home(U, SIZE_MAX);
  parallel_for(U, [&](std::size_t u) {
    auto it = std::lower_bound(homes.users.begin(), homes.users.end(), index.user_id(u));
    if (it == homes.users.end() || *it != index.user_id(u)) return;
    user_home[u] = homes.home[static_cast<std::size_t>(it - homes.users.begin())];
    std::array<std::vector<Point>, kSubsets> pts;
    for (const auto& p : index.track(u)) {
      Point at = h.subprefs()[p.subpref].centroid;
      const bool night = is_night_hour(hour_of_day(p.at));
      const bool weekend = day_type(p.at) == DayType::weekend;
      pts[kAll].push_back(at);
      if (night) pts[kNight].push_back(at);
      pts[weekend ? kWe : kWd].push_back(at);
      if (night) pts[weekend ? kWeNight : kWdNight].push_back(at);
    }
    for (std::size_t s = 0; s < kSubsets; ++s) {
      auto m = spatial_metrics(pts[s]);
      per_user(u, 4 * s + 0) = m.gyration;
      per_user(u, 4 * s + 1) = m.area;
      per_user(u, 4 * s + 2) = m.perimeter;
      per_user(u, 4 * s + 3) = m.diameter;
    }
    per_user(u, kCols - 1) = path_length(pts[kAll]);
  });

  std::vector<std::vector<std::size_t>> members(D);
  for (std::size_t u = 0; u < U; ++u) {
    if (user_home[u] != SIZE_MAX) members[user_home[u]].push_back(u);
  }
  FeatureMatrix m = blank(h, kCols);
  std::string empty_note;
  for (std::size_t d = 0; d < D; ++d) {
    if (!members[d].empty()) continue;
    empty_note += empty_note.empty() ? "no resident users: " : ",";
    empty_note += std::to_string(m.departments[d]);
  }
  for (std::size_t s = 0; s < kSubsets; ++s) {
    for (std::size_t k = 0; k < 4; ++k) {
      m.columns.push_back({std::string("spat_") + kMetricNames[k] + "_" + kSubsetNames[s], Family::spatial,
                           kSubsetNames[s], "95th percentile over resident users", empty_note});
    }
  }
  m.columns.push_back({"spat_totdist", Family::spatial, "all", "95th percentile over resident users", empty_note});
  for (std::size_t d = 0; d < D; ++d) {
    std::vector<double> v(members[d].size());
    for (std::size_t c = 0; c < kCols; ++c) {
      for (std::size_t i = 0; i < members[d].size(); ++i) v[i] = per_user(members[d][i], c);
      m.values(d, c) = percentile(v, 0.95);
    }
  }
  return m;
}

FeatureMatrix migration_features(std::span<const Stay> stays, const HomeAssignment& homes, const SpatialHierarchy& h) {
  const std::size_t D = h.department_count();
  constexpr std::size_t kThresholds = 11;
  FeatureMatrix m = blank(h, 2 * kThresholds);
  const auto residents = homes.residents(D);
  const std::string note = zero_denominator_note(residents, m.departments);
  for (const char* dir : {"out", "in"}) {
    for (std::size_t k = 0; k < kThresholds; ++k) {
      std::string suffix = k == 0 ? "all" : "gt" + std::to_string(k) + "d";
      m.columns.push_back({std::string("mig_") + dir + "_" + suffix, Family::migration,
                           k == 0 ? "" : "> " + std::to_string(k) + " days", "per resident user", note});
    }
  }
  for (std::size_t k = 0; k < kThresholds; ++k) {
    auto flow = mobility_flow(stays, homes, h,
                              k == 0 ? std::nullopt : std::optional<double>(static_cast<double>(k)));
    for (std::size_t a = 0; a < D; ++a) {
      for (std::size_t b = 0; b < D; ++b) {
        if (a == b) continue;
        m.values(a, k) += flow.values(a, b);
        m.values(b, kThresholds + k) += flow.values(a, b);
      }
    }
  }
  divide_rows(m.values, residents, 0, 2 * kThresholds);
  return m;
}

FeatureMatrix activity_features(const TrajectoryIndex& index, const HomeAssignment& homes, const SpatialHierarchy& h) {
  const std::size_t D = h.department_count();
  constexpr std::size_t kCols = 2 * kSlotsPerDayType + 1;
  FeatureMatrix m = blank(h, kCols);
  for (std::size_t u = 0; u < index.user_count(); ++u) {
    auto it = std::lower_bound(homes.users.begin(), homes.users.end(), index.user_id(u));
    if (it == homes.users.end() || *it != index.user_id(u)) continue;
    const std::size_t d = homes.home[static_cast<std::size_t>(it - homes.users.begin())];
    for (const auto& p : index.track(u)) {
      const auto t = static_cast<std::size_t>(day_type(p.at));
      for (std::size_t s : slots_of_hour(hour_of_day(p.at))) m.values(d, t * kSlotsPerDayType + s) += 1.0;
      m.values(d, kCols - 1) += 1.0;
    }
  }
  const auto residents = homes.residents(D);
  const std::string note = zero_denominator_note(residents, m.departments);
  for (DayType t : {DayType::weekday, DayType::weekend}) {
    for (std::size_t s = 0; s < kSlotsPerDayType; ++s) {
      m.columns.push_back({"act_" + slot_name(t, s), Family::activity, slot_name(t, s), "per resident user", note});
    }
  }
  m.columns.push_back({"act_total", Family::activity, "", "per resident user", note});
  divide_rows(m.values, residents, 0, kCols);
  return m;
}

FeatureMatrix extract_features(const FeatureInputs& in, const SpatialHierarchy& h) {
  if (!in.index || !in.homes) throw ConfigError("feature extraction needs trajectories and homes");
  std::array<FeatureMatrix, 4> parts{connectivity_features(in.antenna, h, in.populations),
                                     spatial_features(*in.index, *in.homes, h),
                                     migration_features(in.stays, *in.homes, h),
                                     activity_features(*in.index, *in.homes, h)};
  return concat_columns(parts);
}

FeatureMatrix normalize_by_mean(const FeatureMatrix& m) {
  FeatureMatrix out = m;
  const std::size_t R = m.values.rows();
  for (std::size_t c = 0; c < m.columns.size(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < R; ++r) mean += m.values(r, c);
    mean /= static_cast<double>(R);
    auto& col = out.columns[c];
    if (mean == 0.0 || !std::isfinite(mean)) {
      col.note += col.note.empty() ? "zero mean, unscaled" : "; zero mean, unscaled";
      continue;
    }
    for (std::size_t r = 0; r < R; ++r) out.values(r, c) = m.values(r, c) / mean;
    col.normalization += "; divided by column mean";
  }
  return out;
}

void write_features_tsv(std::ostream& out, const FeatureMatrix& m, std::string_view manifest_hash) {
  if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << '\n';
  std::string line = "dept";
  for (const auto& c : m.columns) line += '\t' + c.name;
  out << line << '\n';
  for (std::size_t r = 0; r < m.departments.size(); ++r) {
    line = std::to_string(m.departments[r]);
    for (double v : m.values.row(r)) {
      line += '\t';
      append_double(line, v);
    }
    out << line << '\n';
  }
}

FeatureMatrix read_features_tsv(std::istream& in) {
  FeatureMatrix m;
  std::vector<double> data;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  auto fail = [&](const std::string& msg) {
    return ParseError({{lineno, msg}}, "feature matrix line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto text = rtrim(line);
    if (text.empty() || text.front() == '#') continue;
    auto cells = split_tabs(text);
    if (!header) {
      for (std::size_t i = 1; i < cells.size(); ++i) {
        auto fam = family_of(cells[i]);
        if (!fam) throw fail("unknown feature family for '" + std::string(cells[i]) + "'");
        m.columns.push_back({std::string(cells[i]), *fam, "", "", ""});
      }
      header = true;
      continue;
    }
    if (cells.size() != m.columns.size() + 1) throw fail("wrong column count");
    auto id = parse_uint(cells[0]);
    if (!id) throw fail("bad department id");
    m.departments.push_back(static_cast<DeptId>(*id));
    for (std::size_t i = 1; i < cells.size(); ++i) {
      auto v = parse_double(cells[i]);
      if (!v) throw fail("bad value");
      data.push_back(*v);
    }
  }
  m.values = Matrix(m.departments.size(), m.columns.size());
  std::copy(data.begin(), data.end(), m.values.data().begin());
  return m;
}

void write_features_sidecar(std::ostream& out, const FeatureMatrix& m, std::string_view manifest_hash) {
  using nlohmann::ordered_json;
  ordered_json doc;
  if (!manifest_hash.empty()) doc["manifest"] = manifest_hash;
  doc["rows"] = m.departments;
  ordered_json counts = ordered_json::object();
  for (Family f : kFamilies) counts[std::string(to_string(f))] = m.family_columns(f).size();
  doc["family_counts"] = counts;
  doc["columns"] = ordered_json::array();
  for (const auto& c : m.columns) {
    ordered_json col{{"name", c.name}, {"family", to_string(c.family)}, {"slot", c.slot},
                     {"normalization", c.normalization}};
    if (!c.note.empty()) col["note"] = c.note;
    // Connectivity and activity column layouts are this toolkit's own decomposition.
    if (c.family == Family::connectivity || c.family == Family::activity) col["reconstructed"] = true;
    doc["columns"].push_back(std::move(col));
  }
  out << doc.dump(1) << '\n';
}

}  // namespace hivmob
