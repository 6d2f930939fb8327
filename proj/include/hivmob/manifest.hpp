#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hivmob/explain.hpp"
#include "hivmob/features.hpp"
#include "hivmob/prevalence.hpp"
#include "hivmob/regress.hpp"
#include "hivmob/time.hpp"

namespace hivmob {

struct RunInputs {
  std::string antenna;       // TSV traffic records
  std::string trajectories;  // TSV user events
  std::string hierarchy;     // JSON
  std::string population;    // JSON
  std::string survey;        // TSV clusters
  std::string target;        // optional TSV (dept, prevalence); default is the prevalence estimates
};

struct RunManifest {
  std::uint64_t seed = 1;
  TimeWindow window = default_observation_window();
  RunInputs inputs;
  std::filesystem::path out;  // not part of the hash
  bool drop_invalid = false;
  std::size_t max_parse_errors = 0;

  KernelConfig kernel;
  QualityThresholds quality;

  std::vector<Method> methods{Method::svr};
  std::vector<Family> families{kFamilies.begin(), kFamilies.end()};
  std::vector<double> ridge_grid = default_grid(Method::ridge);
  std::vector<double> svr_grid = default_grid(Method::svr);
  double epsilon = 0.1;
  std::size_t rfe_target = 3;  // 0 disables RFE
  Reselect reselect = Reselect::per_round;
  Protocol protocol = Protocol::nested;
  std::size_t permutation_seeds = 10;

  std::vector<Quality> row_quality;  // regression rows; empty means every department

  ContributionConfig contribution;
  std::size_t top_k = 3;
  Method explain_method = Method::svr;

  ModelSpec model_spec(Method m) const;
  /// Throws ConfigError on inconsistent values.
  void check() const;
};

/// Unknown keys are rejected. Relative input paths are resolved against `base_dir`.
RunManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunManifest read_manifest_file(const std::filesystem::path& path);

/// Canonical JSON (sorted structure, shortest numbers), without the output directory.
std::string canonical_manifest(const RunManifest& m);
/// 16 hex digits of the 64-bit FNV-1a hash of the canonical manifest.
std::string manifest_hash(const RunManifest& m);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace hivmob
