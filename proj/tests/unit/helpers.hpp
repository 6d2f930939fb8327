#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hivmob/hierarchy.hpp"
#include "hivmob/matrix.hpp"

namespace hivmob::test {

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline double rel_diff(double a, double b) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

// Two departments side by side, one sub-prefecture and one antenna each.
inline SpatialHierarchy two_department_hierarchy() {
  std::vector<DepartmentInfo> d(2);
  d[0] = {1, 1, "A", {5, 5}, {{0, 0}, {10, 0}, {10, 10}, {0, 10}}};
  d[1] = {2, 1, "B", {15, 5}, {{10, 0}, {20, 0}, {20, 10}, {10, 10}}};
  std::vector<SubprefInfo> s{{11, 1, {5, 5}}, {21, 2, {15, 5}}};
  std::vector<AntennaInfo> a{{101, {4, 4}, 11}, {201, {16, 6}, 21}};
  return SpatialHierarchy::build(a, s, d, {1});
}

}  // namespace hivmob::test
