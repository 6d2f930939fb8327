#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "hivmob/hierarchy.hpp"
#include "hivmob/records.hpp"

namespace hivmob {

/// A survey sampling point: how many were tested there and how many tested positive.
struct SurveyCluster {
  Point location;
  std::uint64_t n_tested = 1;
  std::uint64_t n_positive = 0;

  double prevalence() const { return static_cast<double>(n_positive) / static_cast<double>(n_tested); }
  friend bool operator==(const SurveyCluster&, const SurveyCluster&) = default;
};

/// TSV rows: x, y, n_tested, n_positive. Requires n_tested > 0 and n_positive <= n_tested.
ParseResult<SurveyCluster> parse_survey_clusters(std::istream& in, const ParseOptions& opts = {});
void write_survey_clusters(std::ostream& out, std::span<const SurveyCluster> clusters);

}  // namespace hivmob
