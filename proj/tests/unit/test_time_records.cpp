#include <sstream>

#include "doctest.h"

#include "hivmob/numfmt.hpp"
#include "hivmob/records.hpp"
#include "hivmob/survey.hpp"
#include "hivmob/time.hpp"

using namespace hivmob;

TEST_CASE("calendar helpers") {
  Timestamp t = make_timestamp(2011, 12, 1, 3, 4, 5);
  CHECK(t.sec == 1322708645);
  CHECK(hour_of_day(t) == 3);
  CHECK(day_type(t) == DayType::weekday);  // a Thursday
  CHECK(day_type(make_timestamp(2011, 12, 3)) == DayType::weekend);
  CHECK(day_type(make_timestamp(2011, 12, 4)) == DayType::weekend);
  CHECK(day_type(make_timestamp(2011, 12, 5)) == DayType::weekday);
  CHECK(day_index(make_timestamp(1969, 12, 31, 23)) == -1);
  auto w = default_observation_window();
  CHECK(w.begin == make_timestamp(2011, 12, 1));
  CHECK(w.end == make_timestamp(2012, 4, 29));
  CHECK(w.contains(make_timestamp(2012, 4, 28, 23, 59, 59)));
  CHECK_FALSE(w.contains(w.end));
}

TEST_CASE("timestamp text round trip and coarse forms") {
  Timestamp t = make_timestamp(2012, 2, 29, 23, 59, 58);
  CHECK(format_timestamp(t) == "2012-02-29T23:59:58");
  CHECK(parse_timestamp(format_timestamp(t)) == t);
  CHECK(parse_timestamp("2012-02-29T23") == make_timestamp(2012, 2, 29, 23));
  CHECK(parse_timestamp("2012-02-29T23:10") == make_timestamp(2012, 2, 29, 23, 10));
  CHECK(parse_timestamp("2012-02-29") == make_timestamp(2012, 2, 29));
  CHECK_FALSE(parse_timestamp("2011-02-29"));
  CHECK_FALSE(parse_timestamp("2012-13-01"));
  CHECK_FALSE(parse_timestamp("2012-01-01T24"));
  CHECK_FALSE(parse_timestamp("garbage"));
  CHECK(format_hour_stamp(make_timestamp(2011, 12, 1, 7)) == "2011-12-01T07");
  CHECK(parse_hour_stamp("2011-12-01T07") == make_timestamp(2011, 12, 1, 7));
}

TEST_CASE("shortest round-trip doubles") {
  for (double v : {0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 123456789.125}) {
    auto s = format_double(v);
    REQUIRE(parse_double(s));
    CHECK(*parse_double(s) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK_FALSE(parse_double("1.0x"));
  CHECK_FALSE(parse_double(""));
  CHECK(parse_uint("42") == 42u);
  CHECK_FALSE(parse_uint("-1"));
  CHECK(split_tabs("a\tb\t\tc").size() == 4);
  CHECK(rtrim("x \t\r") == "x");
}

TEST_CASE("antenna records parse, write and reject") {
  std::string text = "2011-12-01T01\t101\t201\t3\t120.5\n2011-12-01T02\t201\t101\t0\t0\n\n";
  std::istringstream in(text);
  auto res = parse_antenna_records(in);
  REQUIRE(res.records.size() == 1);
  CHECK(res.dropped_zero_calls == 1);
  CHECK(res.records[0].n_calls == 3);
  CHECK(res.records[0].total_duration == 120.5);
  std::ostringstream out;
  write_antenna_records(out, res.records);
  CHECK(out.str() == "2011-12-01T01\t101\t201\t3\t120.5\n");

  std::istringstream bad("2011-12-01T01\t101\t201\t3\n");
  CHECK_THROWS_AS(parse_antenna_records(bad), ParseError);
  std::istringstream tolerated("2011-12-01T01\t101\t201\t3\nx\n2011-12-01T01\t101\t201\t1\t1\n");
  auto r2 = parse_antenna_records(tolerated, {.max_errors = 2});
  CHECK(r2.errors.size() == 2);
  CHECK(r2.errors[0].line == 1);
  CHECK(r2.records.size() == 1);
}

TEST_CASE("trajectory records round trip") {
  std::vector<TrajectoryRecord> recs{{"u1", make_timestamp(2011, 12, 1, 1, 2, 3), 11},
                                     {"u2", make_timestamp(2011, 12, 2), 21}};
  std::ostringstream out;
  write_trajectory_records(out, recs);
  std::istringstream in(out.str());
  auto back = parse_trajectory_records(in);
  CHECK(back.records == recs);
  std::istringstream bad("u1\tnot-a-time\t11\n");
  CHECK_THROWS_AS(parse_trajectory_records(bad), ParseError);
}

TEST_CASE("survey clusters validate counts") {
  std::istringstream in("1.5\t2\t25\t3\n");
  auto res = parse_survey_clusters(in);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].prevalence() == doctest::Approx(0.12));
  std::istringstream zero("1\t2\t0\t0\n");
  CHECK_THROWS_AS(parse_survey_clusters(zero), ParseError);
  std::istringstream over("1\t2\t5\t6\n");
  CHECK_THROWS_AS(parse_survey_clusters(over), ParseError);
}
