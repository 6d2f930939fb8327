#include "hivmob/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hivmob/errors.hpp"
#include "hivmob/parallel.hpp"
#include "hivmob/rng.hpp"
#include "hivmob/slots.hpp"

namespace hivmob::synth {

WorldSpec WorldSpec::small(std::uint64_t seed) {
  WorldSpec s;
  s.n_departments = 8;
  s.n_subprefs = 24;
  s.n_antennas = 48;
  s.n_regions = 4;
  s.width_km = 320.0;
  s.height_km = 160.0;
  s.seed = seed;
  return s;
}

namespace {

struct Rect {
  double x0, y0, x1, y1;
  Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  std::vector<Point> polygon() const { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }
};

Rect bbox(std::span<const Point> poly) {
  Rect r{poly[0].x, poly[0].y, poly[0].x, poly[0].y};
  for (const auto& p : poly) {
    r.x0 = std::min(r.x0, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.x1 = std::max(r.x1, p.x);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

// Splits `total` items into `parts` near-equal shares, larger shares first.
std::vector<std::size_t> split_even(std::size_t total, std::size_t parts) {
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
  return out;
}

double lognormal(Engine& e, double median, double sigma) {
  return median * std::exp(sigma * standard_normal(e));
}

std::vector<std::vector<std::size_t>> subprefs_by_department(const SpatialHierarchy& h) {
  std::vector<std::vector<std::size_t>> out(h.department_count());
  for (std::size_t s = 0; s < h.subprefs().size(); ++s) {
    out[*h.department_index(h.subprefs()[s].department)].push_back(s);
  }
  return out;
}

std::vector<std::vector<std::size_t>> antennas_by_department(const SpatialHierarchy& h) {
  std::vector<std::vector<std::size_t>> out(h.department_count());
  for (std::size_t a = 0; a < h.antennas().size(); ++a) {
    out[*h.department_of_antenna(h.antennas()[a].id)].push_back(a);
  }
  return out;
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Hours in the window per (day type, hour of day).
std::array<std::array<double, 24>, 2> hour_counts(TimeWindow w) {
  std::array<std::array<double, 24>, 2> c{};
  std::int64_t first = w.begin.sec - (w.begin.sec % kSecondsPerHour + kSecondsPerHour) % kSecondsPerHour;
  for (std::int64_t t = first; t < w.end.sec; t += kSecondsPerHour) {
    if (t < w.begin.sec) continue;
    Timestamp ts{t};
    c[static_cast<std::size_t>(day_type(ts))][static_cast<std::size_t>(hour_of_day(ts))] += 1.0;
  }
  return c;
}

}  // namespace

World generate_world(const WorldSpec& spec) {
  if (spec.n_departments == 0) throw ConfigError("world needs at least one department");
  if (spec.n_subprefs < spec.n_departments) {
    throw ConfigError("n_subprefs (" + std::to_string(spec.n_subprefs) + ") < n_departments (" +
                      std::to_string(spec.n_departments) + ")");
  }
  if (spec.n_antennas < spec.n_subprefs) {
    throw ConfigError("n_antennas (" + std::to_string(spec.n_antennas) + ") < n_subprefs (" +
                      std::to_string(spec.n_subprefs) + ")");
  }
  if (spec.n_regions == 0) throw ConfigError("world needs at least one region");
  if (!(spec.width_km > 0.0) || !(spec.height_km > 0.0)) throw ConfigError("world extent must be positive");
  if (!(spec.user_scale > 0.0)) throw ConfigError("user_scale must be positive");
  if (!spec.populations.empty() && spec.populations.size() != spec.n_departments) {
    throw ConfigError("populations must list one value per department");
  }

  const std::size_t D = spec.n_departments;
  Engine eng = make_stream(spec.seed, {stream_tag::world, 0});

  std::vector<double> pops = spec.populations;
  if (pops.empty()) {
    for (std::size_t d = 0; d < D; ++d) pops.push_back(std::round(2e5 * std::exp(0.7 * standard_normal(eng))));
  }
  for (double p : pops) {
    if (!(p > 0.0)) throw ConfigError("department populations must be positive");
  }

  const auto rows = static_cast<std::size_t>(
      std::max(1.0, std::round(std::sqrt(static_cast<double>(D) * spec.height_km / spec.width_km))));
  const auto row_counts = split_even(D, std::min(rows, D));
  const double row_h = spec.height_km / static_cast<double>(row_counts.size());

  std::vector<Rect> cells;
  for (std::size_t r = 0; r < row_counts.size(); ++r) {
    double w = spec.width_km / static_cast<double>(row_counts[r]);
    for (std::size_t c = 0; c < row_counts[r]; ++c) {
      cells.push_back({w * static_cast<double>(c), row_h * static_cast<double>(r), w * static_cast<double>(c + 1),
                       row_h * static_cast<double>(r + 1)});
    }
  }

  const std::size_t n_regions = std::min(spec.n_regions, D);
  std::vector<RegionId> regions(n_regions);
  std::iota(regions.begin(), regions.end(), RegionId{1});

  std::vector<DepartmentInfo> depts;
  std::vector<SubprefInfo> subprefs;
  std::vector<AntennaInfo> antennas;
  const auto sp_counts = split_even(spec.n_subprefs, D);
  std::vector<Rect> sp_cells;
  for (std::size_t d = 0; d < D; ++d) {
    DepartmentInfo info;
    info.id = static_cast<DeptId>(d + 1);
    info.region = static_cast<RegionId>(1 + d * n_regions / D);
    char name[24];
    std::snprintf(name, sizeof name, "D%02zu", d + 1);
    info.name = name;
    info.centroid = cells[d].center();
    info.polygon = cells[d].polygon();
    depts.push_back(std::move(info));

    const Rect& cell = cells[d];
    const double strip = (cell.x1 - cell.x0) / static_cast<double>(sp_counts[d]);
    for (std::size_t k = 0; k < sp_counts[d]; ++k) {
      Rect s{cell.x0 + strip * static_cast<double>(k), cell.y0, cell.x0 + strip * static_cast<double>(k + 1),
             cell.y1};
      subprefs.push_back({static_cast<SubprefId>(subprefs.size() + 1), static_cast<DeptId>(d + 1), s.center()});
      sp_cells.push_back(s);
    }
  }
  const auto ant_counts = split_even(spec.n_antennas, spec.n_subprefs);
  for (std::size_t s = 0; s < subprefs.size(); ++s) {
    const Rect& r = sp_cells[s];
    for (std::size_t k = 0; k < ant_counts[s]; ++k) {
      double x = r.x0 + (r.x1 - r.x0) * uniform01(eng);
      double y = r.y0 + (r.y1 - r.y0) * uniform01(eng);
      antennas.push_back({static_cast<AntennaId>(antennas.size() + 1), {x, y}, subprefs[s].id});
    }
  }

  std::vector<std::pair<DeptId, double>> pop_entries;
  for (std::size_t d = 0; d < D; ++d) pop_entries.emplace_back(static_cast<DeptId>(d + 1), pops[d]);

  World world;
  world.spec = spec;
  world.spec.populations = pops;
  world.hierarchy =
      SpatialHierarchy::build(std::move(antennas), std::move(subprefs), std::move(depts), std::move(regions));
  world.populations = PopulationTable(std::move(pop_entries), spec.user_scale);
  return world;
}

BehaviorPlan default_plan(const World& world, std::uint64_t seed) {
  const auto& h = world.hierarchy;
  const std::size_t D = h.department_count();
  Engine eng = make_stream(seed, {stream_tag::plan, 0});

  BehaviorPlan plan;
  for (std::size_t d = 0; d < D; ++d) {
    plan.day_rate.push_back(0.05 * (0.8 + 0.4 * uniform01(eng)));
    plan.night_rate.push_back(0.01 * (0.3 + 1.7 * uniform01(eng)));
    plan.weekend_night_factor.push_back(0.5 + 2.0 * uniform01(eng));
  }

  // Gravity law: trips to b proportional to pop_b / (distance + 50 km)^2.
  const auto pops = world.populations.rescaled(h);
  plan.migration = Matrix(D, D);
  const double trips_per_user = 3.0;
  for (std::size_t a = 0; a < D; ++a) {
    double total = 0.0;
    for (std::size_t b = 0; b < D; ++b) {
      if (a == b) continue;
      double dist = distance(h.departments()[a].centroid, h.departments()[b].centroid);
      plan.migration(a, b) = pops[b] / ((dist + 50.0) * (dist + 50.0));
      total += plan.migration(a, b);
    }
    for (std::size_t b = 0; b < D && total > 0.0; ++b) plan.migration(a, b) *= trips_per_user / total;
  }
  return plan;
}

void check_plan(const World& world, const BehaviorPlan& plan) {
  const std::size_t D = world.hierarchy.department_count();
  if (plan.night_rate.size() != D || plan.day_rate.size() != D || plan.weekend_night_factor.size() != D) {
    throw ConfigError("behaviour plan rates must list one value per department");
  }
  if (plan.migration.rows() != D || plan.migration.cols() != D) {
    throw ConfigError("migration propensity matrix must be D x D");
  }
  auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
  for (std::size_t d = 0; d < D; ++d) {
    if (!nonneg(plan.night_rate[d]) || !nonneg(plan.day_rate[d]) || !nonneg(plan.weekend_night_factor[d])) {
      throw ConfigError("behaviour plan rates must be finite and non-negative");
    }
  }
  for (double v : plan.migration.data()) {
    if (!nonneg(v)) throw ConfigError("migration propensities must be finite and non-negative");
  }
  if (!nonneg(plan.weekend_day_factor) || !nonneg(plan.event_scale)) {
    throw ConfigError("rate multipliers must be non-negative");
  }
  if (!(plan.stay_min_days > 0.0) || plan.stay_max_days < plan.stay_min_days) {
    throw ConfigError("stay duration bounds must satisfy 0 < min <= max");
  }
  if (plan.links_per_antenna == 0) throw ConfigError("links_per_antenna must be positive");
  if (plan.inner_share < 0.0 || plan.inner_share > 1.0) throw ConfigError("inner_share must be in [0, 1]");
  if (plan.local_excursion_prob < 0.0 || plan.local_excursion_prob > 1.0) {
    throw ConfigError("local_excursion_prob must be in [0, 1]");
  }
}

double call_rate(const BehaviorPlan& plan, std::size_t dept, int hour, DayType type) {
  const bool weekend = type == DayType::weekend;
  if (is_night_hour(hour)) return plan.night_rate[dept] * (weekend ? plan.weekend_night_factor[dept] : 1.0);
  return plan.day_rate[dept] * (weekend ? plan.weekend_day_factor : 1.0);
}

std::vector<AntennaRecord> generate_cdr(const World& world, const BehaviorPlan& plan, TimeWindow window,
                                        std::uint64_t seed) {
  check_plan(world, plan);
  const auto& h = world.hierarchy;
  const std::size_t D = h.department_count();
  const auto subscribers = world.populations.rescaled(h);
  const auto by_dept = antennas_by_department(h);

  // Gravity weights between departments for outgoing links.
  Matrix gravity(D, D);
  for (std::size_t a = 0; a < D; ++a) {
    for (std::size_t b = 0; b < D; ++b) {
      if (a == b) continue;
      double dist = distance(h.departments()[a].centroid, h.departments()[b].centroid);
      gravity(a, b) = subscribers[b] / ((dist + 50.0) * (dist + 50.0));
    }
  }

  const double mean_duration = plan.duration_median_s * std::exp(0.5 * plan.duration_sigma * plan.duration_sigma);
  const double sd_duration =
      mean_duration * std::sqrt(std::exp(plan.duration_sigma * plan.duration_sigma) - 1.0);
  const std::int64_t first_hour = window.begin.sec - ((window.begin.sec % kSecondsPerHour) + kSecondsPerHour) % kSecondsPerHour;

  const std::size_t n_ant = h.antennas().size();
  std::vector<std::vector<AntennaRecord>> per_origin(n_ant);
  parallel_for(n_ant, [&](std::size_t o) {
    const std::size_t a = *h.department_of_antenna(h.antennas()[o].id);
    Engine eng = make_stream(seed, {stream_tag::cdr_link, o});

    // Destination antenna index -> share of this antenna's calls.
    std::vector<std::pair<std::size_t, double>> links;
    auto add_link = [&](std::size_t dest, double w) {
      for (auto& l : links) {
        if (l.first == dest) {
          l.second += w;
          return;
        }
      }
      links.emplace_back(dest, w);
    };
    const bool alone = D == 1;
    const double inner_share = alone ? 1.0 : plan.inner_share;
    const std::size_t k = plan.links_per_antenna;
    std::size_t k_inner = alone ? k : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(k * inner_share)));
    k_inner = std::min(k_inner, by_dept[a].size());
    const std::size_t k_outer = alone ? 0 : (k > k_inner ? k - k_inner : 1);

    std::vector<std::size_t> pool = by_dept[a];
    for (std::size_t i = 0; i < k_inner; ++i) {
      std::size_t j = i + uniform_index(eng, pool.size() - i);
      std::swap(pool[i], pool[j]);
      add_link(pool[i], inner_share / static_cast<double>(k_inner));
    }
    if (k_outer > 0 && inner_share < 1.0) {
      for (std::size_t i = 0; i < k_outer; ++i) {
        std::size_t b = weighted_index(eng, gravity.row(a));
        std::size_t dest = by_dept[b][uniform_index(eng, by_dept[b].size())];
        add_link(dest, (1.0 - inner_share) / static_cast<double>(k_outer));
      }
    }

    const double per_antenna = subscribers[a] / static_cast<double>(by_dept[a].size());
    auto& out = per_origin[o];
    for (std::int64_t t = first_hour; t < window.end.sec; t += kSecondsPerHour) {
      if (t < window.begin.sec) continue;
      Timestamp ts{t};
      const double rate = call_rate(plan, a, hour_of_day(ts), day_type(ts)) * per_antenna;
      if (rate <= 0.0) continue;
      for (const auto& [dest, share] : links) {
        std::int64_t n = poisson(eng, rate * share);
        if (n <= 0) continue;
        double dur = 0.0;
        if (n <= 16) {
          for (std::int64_t c = 0; c < n; ++c) dur += lognormal(eng, plan.duration_median_s, plan.duration_sigma);
        } else {
          dur = static_cast<double>(n) * mean_duration +
                std::sqrt(static_cast<double>(n)) * sd_duration * standard_normal(eng);
        }
        out.push_back({ts, h.antennas()[o].id, h.antennas()[dest].id, static_cast<std::uint64_t>(n),
                       std::max(0.0, std::round(dur))});
      }
    }
  });

  std::vector<AntennaRecord> records;
  std::size_t total = 0;
  for (const auto& v : per_origin) total += v.size();
  records.reserve(total);
  for (auto& v : per_origin) records.insert(records.end(), v.begin(), v.end());
  std::sort(records.begin(), records.end(), [](const AntennaRecord& x, const AntennaRecord& y) {
    if (x.hour_start != y.hour_start) return x.hour_start < y.hour_start;
    if (x.origin != y.origin) return x.origin < y.origin;
    return x.dest < y.dest;
  });
  return records;
}

TrajectoryData generate_trajectories(const World& world, const BehaviorPlan& plan, TimeWindow window,
                                     std::uint64_t seed) {
  check_plan(world, plan);
  const auto& h = world.hierarchy;
  const std::size_t D = h.department_count();
  const auto pops = world.populations.rescaled(h);
  const double pop_total = std::accumulate(pops.begin(), pops.end(), 0.0);
  const auto sp_by_dept = subprefs_by_department(h);

  struct UserSlot {
    std::size_t dept;
    std::size_t ordinal;
  };
  std::vector<UserSlot> slots;
  for (std::size_t d = 0; d < D; ++d) {
    auto n = static_cast<std::size_t>(std::llround(static_cast<double>(plan.users_total) * pops[d] / pop_total));
    n = std::max(n, plan.min_users_per_department);
    for (std::size_t k = 0; k < n; ++k) slots.push_back({d, k});
  }

  const std::int64_t window_len = window.end.sec - window.begin.sec;
  const std::int64_t first_hour =
      window.begin.sec - ((window.begin.sec % kSecondsPerHour) + kSecondsPerHour) % kSecondsPerHour;

  struct Trip {
    std::int64_t start, end;
    std::size_t dest;
  };
  struct UserOut {
    std::vector<TrajectoryRecord> records;
    PlantedUser user;
    std::vector<PlantedStay> stays;
  };
  std::vector<UserOut> outs(slots.size());

  parallel_for(slots.size(), [&](std::size_t u) {
    const std::size_t home = slots[u].dept;
    Engine eng = make_stream(seed, {stream_tag::user, u});
    UserOut& out = outs[u];
    out.user.user_id = std::to_string(u + 1);
    const std::size_t home_sp = sp_by_dept[home][uniform_index(eng, sp_by_dept[home].size())];
    out.user.home_subpref = h.subprefs()[home_sp].id;
    out.user.home_department = h.departments()[home].id;

    const double radius = -plan.mobility_radius_km * std::log(1.0 - uniform01(eng));
    std::vector<std::size_t> local;
    for (std::size_t s : sp_by_dept[home]) {
      if (s != home_sp && distance(h.subprefs()[s].centroid, h.subprefs()[home_sp].centroid) <= radius) {
        local.push_back(s);
      }
    }

    // Candidate trips, accepted greedily in start order.
    std::vector<Trip> candidates;
    for (std::size_t b = 0; b < D; ++b) {
      if (b == home) continue;
      std::int64_t n = poisson(eng, plan.migration(home, b));
      for (std::int64_t i = 0; i < n; ++i) {
        double days = std::clamp(lognormal(eng, plan.stay_median_days, plan.stay_sigma), plan.stay_min_days,
                                 plan.stay_max_days);
        auto len = static_cast<std::int64_t>(std::llround(days * kSecondsPerDay));
        auto start = window.begin.sec + static_cast<std::int64_t>(uniform01(eng) * static_cast<double>(window_len));
        candidates.push_back({start, start + len, b});
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Trip& x, const Trip& y) {
      return x.start != y.start ? x.start < y.start : x.dest < y.dest;
    });
    std::vector<Trip> trips;
    std::int64_t away = 0;
    const auto away_cap = static_cast<std::int64_t>(plan.max_away_fraction * static_cast<double>(window_len));
    for (const Trip& t : candidates) {
      // Room for the return observation one hour after the trip ends.
      if (t.end + 2 * kSecondsPerHour >= window.end.sec) continue;
      if (!trips.empty() && t.start < trips.back().end + 2 * kSecondsPerHour) continue;
      if (away + (t.end - t.start) > away_cap) continue;
      away += t.end - t.start;
      trips.push_back(t);
    }

    auto trip_at = [&](std::int64_t t) -> const Trip* {
      for (const Trip& tr : trips) {
        if (t >= tr.start && t <= tr.end) return &tr;
        if (tr.start > t) break;
      }
      return nullptr;
    };
    auto dest_subpref = [&](const Trip& tr) {
      const auto& pool = sp_by_dept[tr.dest];
      return h.subprefs()[pool[uniform_index(eng, pool.size())]].id;
    };

    std::vector<std::pair<std::int64_t, SubprefId>> events;
    for (std::int64_t t = first_hour; t < window.end.sec; t += kSecondsPerHour) {
      if (t < window.begin.sec) continue;
      Timestamp ts{t};
      double rate = plan.event_scale * call_rate(plan, home, hour_of_day(ts), day_type(ts));
      std::int64_t n = poisson(eng, rate);
      for (std::int64_t i = 0; i < n; ++i) {
        std::int64_t at = t + static_cast<std::int64_t>(uniform_index(eng, kSecondsPerHour));
        if (at >= window.end.sec) continue;
        SubprefId sp;
        if (const Trip* tr = trip_at(at)) {
          sp = dest_subpref(*tr);
        } else if (!local.empty() && uniform01(eng) < plan.local_excursion_prob) {
          sp = h.subprefs()[local[uniform_index(eng, local.size())]].id;
        } else {
          sp = out.user.home_subpref;
        }
        events.emplace_back(at, sp);
      }
    }
    for (const Trip& tr : trips) {
      events.emplace_back(tr.start, dest_subpref(tr));
      events.emplace_back(tr.end, dest_subpref(tr));
      events.emplace_back(tr.end + kSecondsPerHour, out.user.home_subpref);
      out.stays.push_back({out.user.user_id, h.departments()[tr.dest].id, Timestamp{tr.start}, Timestamp{tr.end}});
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    out.records.reserve(events.size());
    for (const auto& [at, sp] : events) out.records.push_back({out.user.user_id, Timestamp{at}, sp});
  });

  TrajectoryData data;
  for (auto& o : outs) {
    data.records.insert(data.records.end(), std::make_move_iterator(o.records.begin()),
                        std::make_move_iterator(o.records.end()));
    data.users.push_back(std::move(o.user));
    data.stays.insert(data.stays.end(), o.stays.begin(), o.stays.end());
  }
  return data;
}

std::vector<double> expected_feature(const World& world, const BehaviorPlan& plan, TimeWindow window,
                                     const std::string& feature) {
  check_plan(world, plan);
  const std::size_t D = world.hierarchy.department_count();
  const auto counts = hour_counts(window);

  // Which (day type, hour) cells the feature sums over.
  std::array<std::array<bool, 24>, 2> cells{};
  auto fail = [&] { return ConfigError("no generator-side value for feature '" + feature + "'"); };
  if (feature == "act_total") {
    for (auto& row : cells) row.fill(true);
  } else {
    if (feature.size() < 8 || feature.compare(0, 4, "act_") != 0 || feature[6] != '_') throw fail();
    auto type = parse_day_type_tag(std::string_view(feature).substr(4, 2));
    auto slot = parse_slot_suffix(std::string_view(feature).substr(7));
    if (!type || !slot) throw fail();
    const Slot& s = slot_scheme()[*slot];
    for (int hr = s.first_hour(); hr < s.end_hour(); ++hr) {
      cells[static_cast<std::size_t>(*type)][static_cast<std::size_t>(hr)] = true;
    }
  }

  std::vector<double> out(D, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    double v = 0.0;
    for (std::size_t t = 0; t < 2; ++t) {
      for (int hr = 0; hr < 24; ++hr) {
        if (!cells[t][static_cast<std::size_t>(hr)]) continue;
        v += counts[t][static_cast<std::size_t>(hr)] * call_rate(plan, d, hr, static_cast<DayType>(t));
      }
    }
    out[d] = plan.event_scale * v;
  }
  return out;
}

PlantedTruth plant_prevalence(const World& world, const BehaviorPlan& plan, TimeWindow window,
                              const std::vector<PlantedLink>& links, double intercept, double noise_sd,
                              std::uint64_t seed) {
  if (!(noise_sd >= 0.0)) throw ConfigError("noise_sd must be non-negative");
  const std::size_t D = world.hierarchy.department_count();
  PlantedTruth truth;
  truth.departments = world.hierarchy.department_ids();
  truth.links = links;
  truth.intercept = intercept;
  truth.noise_sd = noise_sd;
  for (const auto& l : links) truth.feature_values.push_back(expected_feature(world, plan, window, l.feature));

  truth.prevalence.assign(D, intercept);
  for (std::size_t k = 0; k < links.size(); ++k) {
    for (std::size_t d = 0; d < D; ++d) truth.prevalence[d] += links[k].coefficient * truth.feature_values[k][d];
  }
  for (std::size_t d = 0; d < D; ++d) {
    if (noise_sd > 0.0) {
      Engine eng = make_stream(seed, {stream_tag::truth, d});
      truth.prevalence[d] += noise_sd * standard_normal(eng);
    }
    truth.prevalence[d] = std::clamp(truth.prevalence[d], kPrevalenceFloor, kPrevalenceCeiling);
  }
  return truth;
}

std::pair<double, double> range_mapping(const std::vector<double>& values, double lo, double hi) {
  auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (values.empty() || *mx == *mn) return {0.0, 0.5 * (lo + hi)};
  double coef = (hi - lo) / (*mx - *mn);
  return {coef, lo - coef * *mn};
}

std::vector<SurveyCluster> generate_survey(const World& world, const PlantedTruth& truth,
                                           const SurveyPlan& plan, std::uint64_t seed) {
  if (plan.tested_per_cluster == 0) throw ConfigError("tested_per_cluster must be positive");
  if (plan.dense_max_clusters < plan.dense_min_clusters) throw ConfigError("dense cluster range is empty");
  const auto& depts = world.hierarchy.departments();
  std::vector<SurveyCluster> out;
  for (std::size_t d = 0; d < depts.size(); ++d) {
    Engine eng = make_stream(seed, {stream_tag::survey, d});
    const bool dense = uniform01(eng) < plan.dense_fraction;
    std::size_t n = dense ? plan.dense_min_clusters +
                                uniform_index(eng, plan.dense_max_clusters - plan.dense_min_clusters + 1)
                          : uniform_index(eng, plan.sparse_max_clusters + 1);
    Rect r = bbox(depts[d].polygon);
    for (std::size_t i = 0; i < n; ++i) {
      Point p{r.x0 + (r.x1 - r.x0) * uniform01(eng), r.y0 + (r.y1 - r.y0) * uniform01(eng)};
      out.push_back({p, plan.tested_per_cluster, binomial(eng, plan.tested_per_cluster, truth.prevalence[d])});
    }
  }
  return out;
}

}  // namespace hivmob::synth
