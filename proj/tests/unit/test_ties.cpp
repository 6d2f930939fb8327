// Strong-tie classification against exact rational arithmetic.
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"

#include "hivmob/ties.hpp"
#include "oracles.hpp"

using namespace hivmob;

namespace {

std::vector<std::vector<bool>> classify(const Matrix& m) {
  FlowMatrix f;
  for (std::size_t i = 0; i < m.rows(); ++i) f.departments.push_back(static_cast<DeptId>(i + 1));
  f.values = m;
  auto ties = strong_ties(f);
  std::vector<std::vector<bool>> out(m.rows());
  for (std::size_t a = 0; a < m.rows(); ++a) {
    for (const auto& t : ties.ties[a]) {
      out[a].push_back(t.strong);
      CHECK((t.strength >= 1.0) == t.strong);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("exact sum sign") {
  CHECK(exact_sum_sign(std::vector<double>{1e308, 1e308, -1e308, -1e308}) == 0);
  CHECK(exact_sum_sign(std::vector<double>{1.0, 1e-30, -1.0}) == 1);
  CHECK(exact_sum_sign(std::vector<double>{0.1, 0.2, -0.30000000000000004}) == -1);
  CHECK(exact_sum_sign(std::vector<double>{}) == 0);
  const double big = std::numeric_limits<double>::max();
  const double tiny = std::numeric_limits<double>::denorm_min();
  CHECK(exact_sum_sign(std::vector<double>{big, big, -big, -big, tiny}) == 1);
  CHECK(exact_sum_sign(std::vector<double>{big, big, -big, -big, -tiny}) == -1);
  CHECK(exact_sum_sign(std::vector<double>{big, big, -big, tiny}) == 1);
  CHECK(exact_sum_sign(std::vector<double>{-big, -big, 1e300}) == -1);
}

TEST_CASE("boundary s = 1 is strong") {
  std::vector<double> c{1, 2, 3};
  CHECK(at_least_mean(c, 1));
  CHECK_FALSE(at_least_mean(c, 0));
  // Rounded sums would misjudge this one: the exact mean of the doubles is above 0.2.
  std::vector<double> d{0.1, 0.2, 0.30000000000000004};
  CHECK_FALSE(at_least_mean(d, 1));
  Matrix m(3, 3);
  m(0, 1) = 2;
  m(0, 2) = 2;
  auto out = classify(m);
  CHECK(out[0] == std::vector<bool>{true, true});
  CHECK(out[1].empty());
}

TEST_CASE("random matrices match the rational oracle, with exact rescaling") {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix m = oracle::random_flow(rng, trial % 2 == 0);
    auto expect = oracle::strong_ties(m);
    CHECK(classify(m) == expect);
    for (double lambda : {0.5, 8.0, 3.0, 0x1p-40}) {
      Matrix s = m;
      for (double& v : s.data()) v *= lambda;
      CHECK(oracle::strong_ties(s) == expect);  // exact rescaling: the oracle itself is invariant
      CHECK(classify(s) == expect);
    }
  }
}

TEST_CASE("relative weights and TSV") {
  Matrix m(3, 3);
  m(0, 1) = 6;
  m(0, 2) = 2;
  m(1, 0) = 1;
  FlowMatrix f;
  f.departments = {1, 2, 3};
  f.values = m;
  auto t = strong_ties(f);
  REQUIRE(t.ties[0].size() == 2);
  CHECK(t.ties[0][0].peer == 1);
  CHECK(t.ties[0][0].strong);
  CHECK(t.ties[0][0].relative == 1.0);
  CHECK(t.ties[0][0].strength == 1.5);
  CHECK_FALSE(t.ties[0][1].strong);
  CHECK(t.ties[0][1].relative == 0.0);
  CHECK(t.ties[1][0].strong);
  std::ostringstream out;
  write_ties_tsv(out, t, "h");
  CHECK(out.str().find("1\t2\t6\t1.5\tstrong\t1") != std::string::npos);
}
