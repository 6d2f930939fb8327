#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "hivmob/errors.hpp"
#include "hivmob/linalg.hpp"
#include "hivmob/ridge.hpp"
#include "hivmob/svr.hpp"
#include "oracles.hpp"

using namespace hivmob;


TEST_CASE("independently computed duality gap is certified") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 5 + rng() % 40, p = 1 + rng() % 30;
    Matrix x = test::random_matrix(rng, n, p, 0, 3);
    if (trial % 4 == 0 && p > 1) x.set_column(p - 1, x.column(0));  // rank deficient
    auto y = test::random_vector(rng, n, 0, 10);
    double c = std::pow(10.0, -3.0 + 6.0 * static_cast<double>(rng() % 7) / 6.0);
    double eps = 0.1;
    auto sol = solve_svr_gram(gram_rows(x), y, c, {eps});
    double sum = 0;
    for (double d : sol.dual) {
      CHECK(std::fabs(d) <= c * (1 + 1e-12));
      sum += d;
    }
    CHECK(std::fabs(sum) <= 1e-9 * c * n);
    auto fit = fit_svr(x, y, c, {eps});
    double pv = oracle::svr_primal(x, y, fit.coef, fit.intercept, c, eps);
    double dv = oracle::svr_dual(gram_rows(x), y, sol.dual, eps);
    CHECK(pv - dv <= 1e-6);
    CHECK(pv - dv >= -1e-6);
  }
}

TEST_CASE("noiseless data with large C recovers the least-squares slope") {
  std::mt19937_64 rng(72);
  Matrix x = test::random_matrix(rng, 30, 2, 0, 10);
  std::vector<double> y(30);
  for (std::size_t i = 0; i < 30; ++i) y[i] = 1.0 + 2.0 * x(i, 0) - 0.5 * x(i, 1);
  auto ls = fit_ridge(x, y, 0.0);
  auto sv = fit_svr(x, y, 1e3, {1e-4});
  for (std::size_t c = 0; c < 2; ++c) CHECK(std::fabs(sv.coef[c] - ls.coef[c]) <= 1e-3);
  CHECK(std::fabs(sv.intercept - ls.intercept) <= 1e-2);
}

TEST_CASE("targets inside the tube give the zero model") {
  std::mt19937_64 rng(73);
  Matrix x = test::random_matrix(rng, 10, 3);
  std::vector<double> y{1.0, 1.05, 1.1, 1.0, 1.2, 1.15, 1.0, 1.2, 1.1, 1.05};
  auto f = fit_svr(x, y, 10.0, {0.1});
  for (double b : f.coef) CHECK(b == 0.0);
  CHECK(f.intercept == doctest::Approx(1.1).epsilon(1e-12));
}

TEST_CASE("optimal bias is the midpoint of the minimiser interval") {
  std::vector<double> r{0, 1, 2, 10};
  CHECK(optimal_bias(r, 0.0) == doctest::Approx(1.5));
  CHECK(optimal_bias(std::vector<double>{3.0}, 0.5) == doctest::Approx(3.0));
  std::mt19937_64 rng(74);
  for (int trial = 0; trial < 50; ++trial) {
    auto res = test::random_vector(rng, 1 + rng() % 12, -5, 5);
    double eps = 0.3 * (rng() % 4);
    auto loss = [&](double b) {
      double s = 0;
      for (double v : res) s += std::max(0.0, std::fabs(v - b) - eps);
      return s;
    };
    double b = optimal_bias(res, eps);
    double best = INFINITY;
    for (int k = -7000; k <= 7000; ++k) best = std::min(best, loss(k * 1e-3));
    CHECK(loss(b) <= best + 1e-9);
  }
}

TEST_CASE("warm starts reach a certified optimum and bad starts are rejected") {
  std::mt19937_64 rng(75);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 6 + rng() % 30, p = 1 + rng() % 40;
    Matrix k = gram_rows(test::random_matrix(rng, n, p, -1, 1));
    auto y = test::random_vector(rng, n, 0, 10);
    double c = std::pow(10.0, -2.0 + static_cast<double>(rng() % 6));
    // Feasible start: random pairs moved in opposite directions inside [-C, C].
    std::vector<double> start(n, 0.0);
    for (std::size_t t = 0; t + 1 < n; t += 2) {
      double v = c * (2.0 * std::uniform_real_distribution<double>(0, 1)(rng) - 1.0);
      start[t] = v;
      start[t + 1] = -v;
    }
    auto cold = solve_svr_gram(k, y, c, {.epsilon = 0.1});
    auto warm = solve_svr_gram(k, y, c, {.epsilon = 0.1, .start = start});
    double dc = oracle::svr_dual(k, y, cold.dual, 0.1), dw = oracle::svr_dual(k, y, warm.dual, 0.1);
    CHECK(std::fabs(dc - dw) <= 2e-6);
    CHECK(warm.gap <= 1e-6);
    for (double d : warm.dual) CHECK(std::fabs(d) <= c * (1 + 1e-12));
  }
  Matrix k = gram_rows(Matrix(3, 1, 1.0));
  std::vector<double> y{1, 2, 3};
  CHECK_THROWS_AS(solve_svr_gram(k, y, 1.0, {.start = std::vector<double>{1.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(solve_svr_gram(k, y, 1.0, {.start = std::vector<double>{2.0, -2.0, 0.0}}), ConfigError);
  CHECK_THROWS_AS(solve_svr_gram(k, y, 1.0, {.start = std::vector<double>{0.5, 0.0, 0.0}}), ConfigError);
}
