#include <sstream>

#include "doctest.h"
#include "helpers.hpp"

#include "hivmob/hierarchy.hpp"
#include "hivmob/validate.hpp"

using namespace hivmob;

TEST_CASE("lookups resolve through every level") {
  auto h = test::two_department_hierarchy();
  CHECK(h.department_count() == 2);
  CHECK(h.department_of_antenna(101) == 0u);
  CHECK(h.department_of_antenna(201) == 1u);
  CHECK_FALSE(h.department_of_antenna(999));
  CHECK(h.department_of_subpref(21) == 1u);
  CHECK(h.locate({3, 3}) == 0u);
  CHECK(h.locate({13, 3}) == 1u);
  CHECK_FALSE(h.locate({30, 3}));
  CHECK(h.department_ids() == std::vector<DeptId>{1, 2});
}

TEST_CASE("broken references are rejected") {
  std::vector<DepartmentInfo> d{{1, 1, "A", {0, 0}, {{0, 0}, {1, 0}, {1, 1}}}};
  std::vector<SubprefInfo> s{{11, 7, {0, 0}}};
  std::vector<AntennaInfo> a{{101, {0, 0}, 11}};
  CHECK_THROWS_AS(SpatialHierarchy::build(a, s, d, {1}), HierarchyError);
  std::vector<SubprefInfo> s2{{11, 1, {0, 0}}};
  std::vector<AntennaInfo> a2{{101, {0, 0}, 12}};
  CHECK_THROWS_AS(SpatialHierarchy::build(a2, s2, d, {1}), HierarchyError);
}

TEST_CASE("point in polygon") {
  std::vector<Point> sq{{0, 0}, {4, 0}, {4, 4}, {0, 4}};
  CHECK(point_in_polygon({2, 2}, sq));
  CHECK_FALSE(point_in_polygon({5, 2}, sq));
  std::vector<Point> ell{{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}};
  CHECK(point_in_polygon({0.5, 3}, ell));
  CHECK_FALSE(point_in_polygon({3, 3}, ell));
}

TEST_CASE("JSON round trip and population rescaling") {
  auto h = test::two_department_hierarchy();
  std::ostringstream out;
  write_hierarchy_json(out, h);
  std::istringstream in(out.str());
  auto back = read_hierarchy_json(in);
  CHECK(back.department_ids() == h.department_ids());
  CHECK(back.departments()[1].polygon == h.departments()[1].polygon);
  CHECK(back.antennas().size() == 2);

  PopulationTable pop({{2, 300.0}, {1, 100.0}}, 40.0);
  auto r = pop.rescaled(h);
  CHECK(r[0] == doctest::Approx(10.0));
  CHECK(r[1] == doctest::Approx(30.0));
  std::ostringstream pout;
  write_population_json(pout, pop);
  std::istringstream pin(pout.str());
  CHECK(read_population_json(pin).rescaled(h) == r);
  PopulationTable missing({{1, 100.0}}, 40.0);
  CHECK_THROWS_AS(missing.rescaled(h), HierarchyError);
}

TEST_CASE("validation flags unknown ids and out-of-window records") {
  auto h = test::two_department_hierarchy();
  auto w = default_observation_window();
  std::vector<AntennaRecord> recs{{make_timestamp(2011, 12, 1, 1), 101, 201, 1, 10},
                                  {make_timestamp(2011, 12, 1, 1), 101, 999, 1, 10},
                                  {make_timestamp(2013, 1, 1), 101, 201, 1, 10}};
  auto rep = validate_dataset(std::span<const AntennaRecord>(recs), h, w);
  CHECK(rep.affected == 2);
  CHECK_FALSE(rep.accepted(false));
  CHECK(rep.accepted(true));
  auto kept = drop_invalid(std::span<const AntennaRecord>(recs), rep);
  CHECK(kept.size() == 1);
  std::vector<TrajectoryRecord> tr{{"u", make_timestamp(2011, 12, 5), 99}};
  auto trep = validate_dataset(std::span<const TrajectoryRecord>(tr), h, w);
  REQUIRE(trep.violations.size() == 1);
  CHECK(trep.violations[0].kind == ViolationKind::unknown_subpref);
}
