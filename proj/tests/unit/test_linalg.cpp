#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "hivmob/errors.hpp"
#include "hivmob/linalg.hpp"

using namespace hivmob;

namespace {

// Least squares on a column subset by normal equations in long double (tiny sizes).
std::vector<double> subset_ls(const Matrix& a, std::span<const double> b, const std::vector<std::size_t>& cols) {
  const std::size_t k = cols.size();
  std::vector<long double> m(k * k), r(k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      long double s = 0;
      for (std::size_t t = 0; t < a.rows(); ++t) s += (long double)a(t, cols[i]) * a(t, cols[j]);
      m[i * k + j] = s;
    }
    long double s = 0;
    for (std::size_t t = 0; t < a.rows(); ++t) s += (long double)a(t, cols[i]) * b[t];
    r[i] = s;
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = c + 1; i < k; ++i) {
      long double f = m[i * k + c] / m[c * k + c];
      for (std::size_t j = c; j < k; ++j) m[i * k + j] -= f * m[c * k + j];
      r[i] -= f * r[c];
    }
  }
  std::vector<double> x(k);
  for (std::size_t i = k; i-- > 0;) {
    long double s = r[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= m[i * k + j] * x[j];
    x[i] = static_cast<double>(s / m[i * k + i]);
  }
  return x;
}

double residual(const Matrix& a, std::span<const double> x, std::span<const double> b) {
  double s = 0;
  for (std::size_t t = 0; t < a.rows(); ++t) {
    double v = -b[t];
    for (std::size_t c = 0; c < a.cols(); ++c) v += a(t, c) * x[c];
    s += v * v;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("cholesky solves SPD systems and rejects indefinite ones") {
  std::mt19937_64 rng(51);
  for (std::size_t n : {1u, 2u, 5u, 20u}) {
    Matrix r = test::random_matrix(rng, n + 3, n);
    Matrix a = gram_cols(r);
    auto b = test::random_vector(rng, n);
    auto x = solve_spd(a, b);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
      CHECK(std::fabs(s - b[i]) <= 1e-10);
    }
  }
  Matrix bad(2, 2);
  bad(0, 0) = 1;
  bad(1, 1) = -1;
  Matrix l = bad;
  CHECK_FALSE(cholesky(l));
  CHECK_THROWS_AS(solve_spd(bad, std::vector<double>{1, 1}), NumericalError);
}

TEST_CASE("gram products") {
  Matrix a(2, 3);
  a(0, 0) = 1, a(0, 1) = 2, a(0, 2) = 3, a(1, 0) = 4, a(1, 1) = 5, a(1, 2) = 6;
  auto c = gram_cols(a);
  auto r = gram_rows(a);
  CHECK(c.rows() == 3);
  CHECK(c(0, 2) == 1 * 3 + 4 * 6);
  CHECK(r.rows() == 2);
  CHECK(r(0, 1) == 1 * 4 + 2 * 5 + 3 * 6);
}

TEST_CASE("NNLS matches brute force over all 16 active sets") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t rows = 4 + rng() % 10;
    Matrix a = test::random_matrix(rng, rows, 4, -1, 1);
    if (trial % 5 == 0) a.set_column(3, a.column(0));  // exact duplicate column
    auto b = test::random_vector(rng, rows, -2, 2);
    auto got = nnls(a, b);
    for (double v : got.x) CHECK(v >= 0.0);
    double best = residual(a, std::vector<double>(4, 0.0), b);
    for (unsigned mask = 1; mask < 16; ++mask) {
      std::vector<std::size_t> cols;
      for (std::size_t c = 0; c < 4; ++c) {
        if (mask & (1u << c)) cols.push_back(c);
      }
      if (trial % 5 == 0 && (mask & 1u) && (mask & 8u)) continue;  // singular subset
      auto xs = subset_ls(a, b, cols);
      if (std::any_of(xs.begin(), xs.end(), [](double v) { return v < 0.0; })) continue;
      std::vector<double> x(4, 0.0);
      for (std::size_t i = 0; i < cols.size(); ++i) x[cols[i]] = xs[i];
      best = std::min(best, residual(a, x, b));
    }
    CHECK(got.residual_norm == doctest::Approx(residual(a, got.x, b)).epsilon(1e-9));
    CHECK(residual(a, got.x, b) <= best * (1 + 1e-9) + 1e-12);
  }
}
