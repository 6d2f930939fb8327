#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hivmob/hierarchy.hpp"
#include "hivmob/matrix.hpp"
#include "hivmob/records.hpp"
#include "hivmob/survey.hpp"
#include "hivmob/time.hpp"

namespace hivmob::synth {

struct WorldSpec {
  std::size_t n_departments = 50;
  std::size_t n_subprefs = 255;
  std::size_t n_antennas = 1250;
  std::size_t n_regions = 10;
  std::vector<double> populations;  // persons per department; empty = drawn from the seed
  double user_scale = 5e6;          // subscribers the populations are rescaled to
  double width_km = 600.0;
  double height_km = 600.0;
  std::uint64_t seed = 1;

  /// 8 departments, 24 sub-prefectures, 48 antennas.
  static WorldSpec small(std::uint64_t seed);
};

struct World {
  WorldSpec spec;
  SpatialHierarchy hierarchy;
  PopulationTable populations;
};

/// Departments tile the rectangle as axis-aligned cells, sub-prefectures are vertical
/// strips of their department, antennas are scattered inside their strip.
/// Throws ConfigError when the spec violates its invariants.
World generate_world(const WorldSpec& spec);

/// Per-department behaviour plus the knobs of the trajectory and traffic generators.
struct BehaviorPlan {
  std::vector<double> night_rate;            // calls / subscriber / hour in [01:00, 05:00)
  std::vector<double> day_rate;              // calls / subscriber / hour otherwise
  std::vector<double> weekend_night_factor;  // multiplier on night_rate on Sat/Sun
  double weekend_day_factor = 0.9;

  double event_scale = 2.0;  // trajectory events per user per hour = event_scale * rate
  Matrix migration;          // expected trips per user over the window, home -> destination
  double stay_median_days = 2.0;
  double stay_sigma = 0.8;  // log-normal shape
  double stay_min_days = 0.05;
  double stay_max_days = 12.0;
  double max_away_fraction = 0.25;  // cap on the share of the window a user spends on trips

  double mobility_radius_km = 25.0;  // mean of the per-user local radius (exponential)
  double local_excursion_prob = 0.25;

  std::size_t users_total = 400;
  std::size_t min_users_per_department = 12;

  std::size_t links_per_antenna = 8;
  double inner_share = 0.6;          // share of an antenna's calls staying in its department
  double duration_median_s = 60.0;   // log-normal call durations
  double duration_sigma = 0.8;
};

/// Seeded default plan: rates vary across departments, trips follow a gravity law.
BehaviorPlan default_plan(const World& world, std::uint64_t seed);

/// Throws ConfigError when the plan does not match the world or has negative rates.
void check_plan(const World& world, const BehaviorPlan& plan);

/// Expected calls per subscriber in one hour of the given department.
double call_rate(const BehaviorPlan& plan, std::size_t dept, int hour, DayType type);

std::vector<AntennaRecord> generate_cdr(const World& world, const BehaviorPlan& plan, TimeWindow window,
                                        std::uint64_t seed);

struct PlantedStay {
  std::string user_id;
  DeptId department = 0;
  Timestamp start;  // first observation at the destination
  Timestamp end;    // last observation at the destination

  double duration_days() const { return static_cast<double>(end.sec - start.sec) / kSecondsPerDay; }
};

struct PlantedUser {
  std::string user_id;
  SubprefId home_subpref = 0;
  DeptId home_department = 0;
};

struct TrajectoryData {
  std::vector<TrajectoryRecord> records;  // grouped by user, time-ordered within a user
  std::vector<PlantedUser> users;
  std::vector<PlantedStay> stays;
};

TrajectoryData generate_trajectories(const World& world, const BehaviorPlan& plan, TimeWindow window,
                                     std::uint64_t seed);

/// Expected value of an activity feature (act_*) per department, computed from the plan.
/// Throws ConfigError for names the generator cannot evaluate.
std::vector<double> expected_feature(const World& world, const BehaviorPlan& plan, TimeWindow window,
                                     const std::string& feature);

struct PlantedLink {
  std::string feature;
  double coefficient = 0.0;
};

struct PlantedTruth {
  std::vector<DeptId> departments;
  std::vector<double> prevalence;  // fraction, clipped to [0.001, 0.10]
  std::vector<PlantedLink> links;
  double intercept = 0.0;
  double noise_sd = 0.0;
  std::vector<std::vector<double>> feature_values;  // per link, per department
};

inline constexpr double kPrevalenceFloor = 0.001;
inline constexpr double kPrevalenceCeiling = 0.10;

PlantedTruth plant_prevalence(const World& world, const BehaviorPlan& plan, TimeWindow window,
                              const std::vector<PlantedLink>& links, double intercept, double noise_sd,
                              std::uint64_t seed);

/// Coefficient and intercept mapping the range of `values` linearly onto [lo, hi].
std::pair<double, double> range_mapping(const std::vector<double>& values, double lo, double hi);

struct SurveyPlan {
  double dense_fraction = 0.3;  // departments surveyed densely
  std::size_t dense_min_clusters = 8;
  std::size_t dense_max_clusters = 16;
  std::size_t sparse_max_clusters = 1;
  std::uint64_t tested_per_cluster = 25;
};

std::vector<SurveyCluster> generate_survey(const World& world, const PlantedTruth& truth,
                                           const SurveyPlan& plan, std::uint64_t seed);

}  // namespace hivmob::synth
