// Every vector kernel must agree with the scalar reference: bit-identical where the
// contract says so, to rounding elsewhere.
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "hivmob/simd.hpp"

using namespace hivmob;

namespace {

std::vector<const simd::KernelTable*> vector_tables() {
  std::vector<const simd::KernelTable*> t;
  if (auto* a = simd::avx2_table()) t.push_back(a);
  return t;
}

}  // namespace

TEST_CASE("selection can be forced and restored") {
  CHECK(simd::force("scalar"));
  CHECK(simd::active().name == "scalar");
  CHECK_FALSE(simd::force("sse9"));
  CHECK(simd::active().name == "scalar");
  CHECK(simd::force("auto"));
  if (simd::avx2_table()) CHECK(simd::active().name == simd::avx2_table()->name);
}

TEST_CASE("dot and axpy agree with the scalar table") {
  const auto& ref = simd::scalar_table();
  std::mt19937_64 rng(3);
  for (auto* t : vector_tables()) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 17u, 64u, 1001u}) {
      auto a = test::random_vector(rng, n, -3, 3);
      auto b = test::random_vector(rng, n, -3, 3);
      double abs_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) abs_sum += std::fabs(a[i] * b[i]);
      double r = ref.dot(a.data(), b.data(), n), v = t->dot(a.data(), b.data(), n);
      CHECK(std::fabs(r - v) <= 4.0 * n * 1.2e-16 * abs_sum + 1e-300);
      auto y1 = b, y2 = b;
      ref.axpy(0.37, a.data(), y1.data(), n);
      t->axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(y1[i] - y2[i]) <= 2.3e-16 * (std::fabs(y1[i]) + 1.2));
    }
  }
}

TEST_CASE("squared distances are bit-identical") {
  const auto& ref = simd::scalar_table();
  std::mt19937_64 rng(4);
  for (auto* t : vector_tables()) {
    for (std::size_t n : {1u, 4u, 5u, 33u, 200u}) {
      auto xs = test::random_vector(rng, n, -500, 500);
      auto ys = test::random_vector(rng, n, -500, 500);
      std::vector<double> o1(n), o2(n);
      ref.sq_dist(1.5, -2.25, xs.data(), ys.data(), o1.data(), n);
      t->sq_dist(1.5, -2.25, xs.data(), ys.data(), o2.data(), n);
      CHECK(o1 == o2);
    }
  }
}

TEST_CASE("gaussian sums agree to rounding, including the cutoff") {
  const auto& ref = simd::scalar_table();
  std::mt19937_64 rng(5);
  for (auto* t : vector_tables()) {
    for (std::size_t n : {1u, 3u, 4u, 9u, 20u, 101u}) {
      auto x = test::random_vector(rng, n, 0, 100), y = test::random_vector(rng, n, 0, 100);
      auto h = test::random_vector(rng, n, 5, 40);
      std::vector<double> inv_h2(n), norm(n), cut2(n), pos(n), tested(n);
      for (std::size_t i = 0; i < n; ++i) {
        inv_h2[i] = 1.0 / (h[i] * h[i]);
        norm[i] = 1.0 / (2 * M_PI * h[i] * h[i]);
        cut2[i] = 9.0 * h[i] * h[i];
        tested[i] = 20.0 + i;
        pos[i] = static_cast<double>(i % 5);
      }
      simd::GaussianSources src{x.data(), y.data(), inv_h2.data(), norm.data(), cut2.data(),
                                pos.data(), tested.data(), n};
      for (int probe = 0; probe < 50; ++probe) {
        double px = 100.0 * probe / 49.0, py = 50.0;
        auto a = ref.gaussian_sums(px, py, src);
        auto b = t->gaussian_sums(px, py, src);
        CHECK(test::rel_diff(a.kernel, b.kernel) <= 1e-13);
        CHECK(test::rel_diff(a.positive, b.positive) <= 1e-13);
        CHECK(test::rel_diff(a.tested, b.tested) <= 1e-13);
        CHECK((a.kernel == 0.0) == (b.kernel == 0.0));
      }
    }
  }
}
