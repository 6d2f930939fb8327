#include "doctest.h"

#include "hivmob/errors.hpp"
#include "hivmob/manifest.hpp"

using namespace hivmob;

TEST_CASE("parse with defaults and overrides") {
  auto m = parse_manifest(R"({"seed": 9, "inputs": {"survey": "s.tsv", "target": "/abs/t.tsv"},
                              "model": {"methods": ["ridge", "svr"], "rfe_target": 5},
                              "rows": {"quality": ["good"]}})",
                          "/data");
  CHECK(m.seed == 9);
  CHECK(m.inputs.survey == "/data/s.tsv");
  CHECK(m.inputs.target == "/abs/t.tsv");
  CHECK(m.methods == std::vector<Method>{Method::ridge, Method::svr});
  CHECK(m.rfe_target == 5);
  CHECK(m.row_quality == std::vector<Quality>{Quality::good});
  CHECK(m.permutation_seeds == 10);
}

TEST_CASE("unknown keys and bad values are rejected") {
  CHECK_THROWS_AS(parse_manifest(R"({"sede": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_manifest(R"({"model": {"method": ["svr"]}})"), ConfigError);
  CHECK_THROWS_AS(parse_manifest(R"({"model": {"methods": ["lasso"]}})"), ConfigError);
  CHECK_THROWS_AS(parse_manifest(R"({"seed": "one"})"), ConfigError);
  CHECK_THROWS_AS(parse_manifest("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_manifest("{"), ConfigError);
}

TEST_CASE("hash is stable, ignores out, tracks content") {
  auto a = parse_manifest(R"({"seed": 3, "out": "/tmp/x"})");
  auto b = parse_manifest(R"({"out": "/tmp/y", "seed": 3})");
  auto c = parse_manifest(R"({"seed": 4})");
  CHECK(manifest_hash(a) == manifest_hash(b));
  CHECK(manifest_hash(a) != manifest_hash(c));
  CHECK(manifest_hash(a).size() == 16);
  CHECK(canonical_manifest(a).find("/tmp/x") == std::string::npos);
  // The canonical text parses back to the same manifest.
  CHECK(manifest_hash(parse_manifest(canonical_manifest(a))) == manifest_hash(a));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}
