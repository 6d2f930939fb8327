#include <cmath>
#include <atomic>
#include <set>
#include <stdexcept>

#include "doctest.h"

#include "hivmob/parallel.hpp"
#include "hivmob/rng.hpp"

using namespace hivmob;

TEST_CASE("derived seeds are deterministic and key-sensitive") {
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2}) != derive_seed(1, {2, 0}));
  CHECK(derive_seed(1, {2}) != derive_seed(2, {2}));
  auto a = make_stream(5, {stream_tag::user, 7});
  auto b = make_stream(5, {stream_tag::user, 7});
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("uniform draws stay in range and cover it") {
  auto e = make_stream(9, {1});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto v = uniform_index(e, 7);
    CHECK(v < 7);
    seen.insert(v);
    double u = uniform01(e);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(seen.size() == 7);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  for (std::size_t threads : {1u, 3u, 0u}) {
    set_thread_count(threads);
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                    if (i == 4) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
  set_thread_count(0);
}
