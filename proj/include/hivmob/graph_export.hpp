#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "hivmob/hierarchy.hpp"
#include "hivmob/prevalence.hpp"
#include "hivmob/ties.hpp"

namespace hivmob {

/// Prevalence as a percentage with one decimal ("5.1"); used for node labels.
std::string prevalence_label(double fraction);

/// Directed edges from each department to its strong peers, weighted by relative
/// strength. Nodes carry centroids and, when estimates are given, prevalence labels.
void write_tie_dot(std::ostream& out, const TieSet& ties, const SpatialHierarchy& h,
                   std::span<const HivEstimate> prevalence = {}, std::string_view manifest_hash = {});
void write_tie_geojson(std::ostream& out, const TieSet& ties, const SpatialHierarchy& h,
                       std::span<const HivEstimate> prevalence = {}, std::string_view manifest_hash = {});

}  // namespace hivmob
