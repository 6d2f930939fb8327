#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"

#include "hivmob/features.hpp"
#include "hivmob/synthgen.hpp"

using namespace hivmob;

namespace {

struct Small {
  synth::World world;
  std::vector<AntennaRecord> cdr;
  std::vector<TrajectoryRecord> traj;
};

const Small& small() {
  static const Small s = [] {
    Small s{synth::generate_world(synth::WorldSpec::small(3)), {}, {}};
    auto plan = synth::default_plan(s.world, 3);
    Timestamp b = make_timestamp(2011, 12, 1);
    TimeWindow w{b, {b.sec + 21 * kSecondsPerDay}};
    s.cdr = synth::generate_cdr(s.world, plan, w, 3);
    s.traj = synth::generate_trajectories(s.world, plan, w, 3).records;
    return s;
  }();
  return s;
}

FeatureMatrix extract_small() {
  const auto& s = small();
  const auto& h = s.world.hierarchy;
  TrajectoryIndex index(s.traj, h);
  auto homes = infer_home(index, h);
  auto stays = detect_stays(index, homes);
  auto pops = s.world.populations.rescaled(h);
  return extract_features({s.cdr, &index, &homes, stays, pops}, h);
}

}  // namespace

TEST_CASE("224 uniquely named columns in four families") {
  auto fm = extract_small();
  CHECK(fm.columns.size() == kFeatureColumns);
  CHECK(fm.values.cols() == kFeatureColumns);
  CHECK(fm.values.rows() == 8);
  CHECK(fm.family_columns(Family::connectivity).size() == kConnectivityColumns);
  CHECK(fm.family_columns(Family::spatial).size() == kSpatialColumns);
  CHECK(fm.family_columns(Family::migration).size() == kMigrationColumns);
  CHECK(fm.family_columns(Family::activity).size() == kActivityColumns);
  std::set<std::string> names;
  for (const auto& c : fm.columns) {
    names.insert(c.name);
    CHECK(family_of(c.name) == c.family);
  }
  CHECK(names.size() == kFeatureColumns);
  for (double v : fm.values.data()) {
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  CHECK(fm.column_index("act_we_h02"));
  CHECK(fm.column_index("spat_totdist"));
  CHECK(fm.column_index("mig_out_gt10d"));
  CHECK_FALSE(fm.column_index("nope"));
}

TEST_CASE("extraction is deterministic and survives a TSV round trip") {
  auto a = extract_small();
  auto b = extract_small();
  CHECK(a.values == b.values);
  std::ostringstream out;
  write_features_tsv(out, a, "h");
  std::istringstream in(out.str());
  auto back = read_features_tsv(in);
  CHECK(back.values == a.values);
  CHECK(back.departments == a.departments);
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    CHECK(back.columns[c].name == a.columns[c].name);
    CHECK(back.columns[c].family == a.columns[c].family);
  }
}

TEST_CASE("mean normalisation") {
  FeatureMatrix m;
  m.departments = {1, 2};
  m.columns = {{"act_total", Family::activity, "", "", ""}, {"act_wd_h00", Family::activity, "", "", ""}};
  m.values = Matrix(2, 2);
  m.values(0, 0) = 1;
  m.values(1, 0) = 3;
  auto n = normalize_by_mean(m);
  CHECK(n.values(0, 0) == 0.5);
  CHECK(n.values(1, 0) == 1.5);
  CHECK(n.values(0, 1) == 0.0);
  CHECK_FALSE(n.columns[1].note.empty());
}

TEST_CASE("type-7 percentile") {
  CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(percentile({4, 1, 3, 2}, 0.95) == doctest::Approx(3.85));
  CHECK(percentile({7}, 0.95) == 7);
  CHECK(percentile({1, 2}, 0.0) == 1);
  CHECK(percentile({1, 2}, 1.0) == 2);
}
