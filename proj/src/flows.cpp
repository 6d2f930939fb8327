#include "hivmob/flows.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "hivmob/errors.hpp"
#include "hivmob/numfmt.hpp"
#include "hivmob/slots.hpp"

namespace hivmob {

bool TimeFilter::accepts(Timestamp t) const {
  if (day_type && hivmob::day_type(t) != *day_type) return false;
  int hr = hour_of_day(t);
  return hr >= begin_hour && hr < end_hour;
}

std::string TimeFilter::describe() const {
  std::string hours;
  if (begin_hour != 0 || end_hour != 24) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "h%02d-%02d", begin_hour, end_hour);
    hours = buf;
  }
  std::string out = day_type ? std::string(day_type_tag(*day_type)) : std::string();
  if (!out.empty() && !hours.empty()) out += ':';
  out += hours;
  return out.empty() ? "all" : out;
}

std::optional<TimeFilter> TimeFilter::parse(std::string_view s) {
  TimeFilter f;
  if (s == "all") return f;
  if (s.size() >= 2) {
    if (auto t = parse_day_type_tag(s.substr(0, 2))) {
      f.day_type = t;
      s.remove_prefix(2);
      if (s.empty()) return f;
      if (s.front() != ':') return std::nullopt;
      s.remove_prefix(1);
    }
  }
  // hBB-EE
  if (s.size() != 6 || s[0] != 'h' || s[3] != '-') return std::nullopt;
  auto b = parse_uint(s.substr(1, 2));
  auto e = parse_uint(s.substr(4, 2));
  if (!b || !e || *b >= *e || *e > 24) return std::nullopt;
  f.begin_hour = static_cast<int>(*b);
  f.end_hour = static_cast<int>(*e);
  return f;
}

TimeFilter TimeFilter::night() { return {kNightBegin, kNightEnd, std::nullopt}; }

std::string_view to_string(FlowKind k) { return k == FlowKind::communication ? "communication" : "mobility"; }

std::vector<double> HomeAssignment::residents(std::size_t n_departments) const {
  std::vector<double> out(n_departments, 0.0);
  for (std::size_t d : home) out[d] += 1.0;
  return out;
}

HomeAssignment infer_home(const TrajectoryIndex& index, const SpatialHierarchy& h) {
  const std::size_t D = h.department_count();
  HomeAssignment out;
  std::vector<std::size_t> counts(D);
  for (std::size_t u = 0; u < index.user_count(); ++u) {
    auto track = index.track(u);
    if (track.empty()) continue;
    std::fill(counts.begin(), counts.end(), 0);
    for (const auto& p : track) ++counts[p.department];
    // Hierarchy order is id order, so the first maximum has the smallest id.
    auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    out.users.push_back(index.user_id(u));
    out.home.push_back(best);
    out.tie_broken.push_back(std::count(counts.begin(), counts.end(), counts[best]) > 1);
  }
  return out;
}

namespace {

FlowMatrix empty_flow(const SpatialHierarchy& h, FlowKind kind) {
  FlowMatrix m;
  m.kind = kind;
  m.departments = h.department_ids();
  m.values = Matrix(h.department_count(), h.department_count());
  return m;
}

std::optional<std::size_t> home_of(const HomeAssignment& homes, std::string_view user) {
  auto it = std::lower_bound(homes.users.begin(), homes.users.end(), user);
  if (it == homes.users.end() || *it != user) return std::nullopt;
  return homes.home[static_cast<std::size_t>(it - homes.users.begin())];
}

}  // namespace

FlowMatrix comm_flow(std::span<const AntennaRecord> records, const SpatialHierarchy& h, const TimeFilter& filter) {
  FlowMatrix m = empty_flow(h, FlowKind::communication);
  m.filter = filter;
  for (const auto& r : records) {
    auto a = h.department_of_antenna(r.origin);
    auto b = h.department_of_antenna(r.dest);
    if (!a || !b) {
      ++m.excluded;
      continue;
    }
    if (filter.accepts(r.hour_start)) m.values(*a, *b) += static_cast<double>(r.n_calls);
  }
  return m;
}

std::vector<Stay> detect_stays(const TrajectoryIndex& index, const HomeAssignment& homes) {
  std::vector<Stay> stays;
  for (std::size_t u = 0; u < index.user_count(); ++u) {
    auto home = home_of(homes, index.user_id(u));
    if (!home) continue;
    auto track = index.track(u);
    std::size_t i = 0;
    while (i < track.size()) {
      std::size_t j = i + 1;
      while (j < track.size() && track[j].department == track[i].department) ++j;
      if (track[i].department != *home) {
        stays.push_back({index.user_id(u), track[i].department, track[i].at, track[j - 1].at});
      }
      i = j;
    }
  }
  return stays;
}

FlowMatrix mobility_flow(std::span<const Stay> stays, const HomeAssignment& homes, const SpatialHierarchy& h,
                         std::optional<double> min_stay_days) {
  FlowMatrix m = empty_flow(h, FlowKind::mobility);
  m.min_stay_days = min_stay_days;
  for (const auto& s : stays) {
    auto home = home_of(homes, s.user_id);
    if (!home) {
      ++m.excluded;
      continue;
    }
    // Compare in whole seconds so the threshold test is exact.
    if (min_stay_days) {
      auto limit = static_cast<double>(kSecondsPerDay) * *min_stay_days;
      if (!(static_cast<double>(s.end.sec - s.start.sec) > limit)) continue;
    }
    m.values(*home, s.department) += 1.0;
  }
  return m;
}

FlowMatrix mobility_flow(const TrajectoryIndex& index, const HomeAssignment& homes, const SpatialHierarchy& h,
                         std::optional<double> min_stay_days) {
  auto stays = detect_stays(index, homes);
  return mobility_flow(stays, homes, h, min_stay_days);
}

FlowMatrix normalize_flows(const FlowMatrix& m, std::span<const double> pops) {
  const std::size_t D = m.values.rows();
  if (pops.size() != D) throw ConfigError("population vector does not match the flow matrix");
  FlowMatrix out = m;
  for (std::size_t a = 0; a < D; ++a) {
    auto row = out.values.row(a);
    bool nonzero = std::any_of(row.begin(), row.end(), [](double v) { return v != 0.0; });
    if (!nonzero) continue;
    if (!(pops[a] > 0.0)) {
      throw ConfigError("department " + std::to_string(m.departments[a]) + " has flow but population " +
                        format_double(pops[a]));
    }
    for (double& v : row) v /= pops[a];
  }
  return out;
}

FlowMatrix pair_strength(const FlowMatrix& m) {
  const std::size_t D = m.values.rows();
  FlowMatrix out = m;
  for (std::size_t a = 0; a < D; ++a) {
    for (std::size_t b = 0; b < D; ++b) out.values(a, b) = a == b ? 0.0 : m.values(a, b) + m.values(b, a);
  }
  return out;
}

void write_flow_tsv(std::ostream& out, const FlowMatrix& m, std::string_view manifest_hash) {
  out << "# kind=" << to_string(m.kind) << " filter=" << m.filter.describe();
  if (m.min_stay_days) out << " min_stay_days=" << format_double(*m.min_stay_days);
  if (!manifest_hash.empty()) out << " manifest=" << manifest_hash;
  out << '\n';
  std::string line = "dept";
  for (DeptId d : m.departments) line += '\t' + std::to_string(d);
  out << line << '\n';
  for (std::size_t a = 0; a < m.departments.size(); ++a) {
    line = std::to_string(m.departments[a]);
    for (double v : m.values.row(a)) {
      line += '\t';
      append_double(line, v);
    }
    out << line << '\n';
  }
}

FlowMatrix read_flow_tsv(std::istream& in) {
  FlowMatrix m;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::vector<double>> rows;
  bool header = false;
  auto fail = [&](const std::string& msg) {
    return ParseError({{lineno, msg}}, "flow matrix line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto text = rtrim(line);
    if (text.empty()) continue;
    if (text.front() == '#') {
      // "# kind=... filter=... [min_stay_days=...] [manifest=...]"
      std::string_view rest = text.substr(1);
      while (!rest.empty()) {
        while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
        std::size_t end = rest.find(' ');
        std::string_view tok = rest.substr(0, end);
        rest = end == std::string_view::npos ? std::string_view() : rest.substr(end);
        std::size_t eq = tok.find('=');
        if (eq == std::string_view::npos) continue;
        std::string_view key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "kind") {
          if (val == "mobility") m.kind = FlowKind::mobility;
          else if (val == "communication") m.kind = FlowKind::communication;
          else throw fail("unknown flow kind");
        } else if (key == "filter") {
          auto f = TimeFilter::parse(val);
          if (!f) throw fail("unknown time filter");
          m.filter = *f;
        } else if (key == "min_stay_days") {
          auto v = parse_double(val);
          if (!v) throw fail("bad min_stay_days");
          m.min_stay_days = *v;
        }
      }
      continue;
    }
    auto cells = split_tabs(text);
    if (!header) {
      for (std::size_t i = 1; i < cells.size(); ++i) {
        auto id = parse_uint(cells[i]);
        if (!id) throw fail("bad department id");
        m.departments.push_back(static_cast<DeptId>(*id));
      }
      header = true;
      continue;
    }
    if (cells.size() != m.departments.size() + 1) throw fail("wrong column count");
    auto id = parse_uint(cells[0]);
    if (!id || rows.size() >= m.departments.size() || *id != m.departments[rows.size()]) {
      throw fail("row label does not match header");
    }
    std::vector<double> row;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      auto v = parse_double(cells[i]);
      if (!v || *v < 0.0) throw fail("bad entry");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != m.departments.size()) throw fail("matrix is not square");
  m.values = Matrix(rows.size(), rows.size());
  for (std::size_t a = 0; a < rows.size(); ++a) std::copy(rows[a].begin(), rows[a].end(), m.values.row(a).begin());
  return m;
}

}  // namespace hivmob
