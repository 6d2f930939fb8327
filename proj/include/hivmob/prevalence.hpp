#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hivmob/hierarchy.hpp"
#include "hivmob/survey.hpp"

namespace hivmob {

enum class Quality { good, moderate, uncertain };

std::string_view to_string(Quality q);
std::optional<Quality> parse_quality(std::string_view s);

struct HivEstimate {
  DeptId department = 0;
  double prevalence = 0.0;  // fraction
  Quality quality = Quality::uncertain;
  std::size_t cells = 0;  // defined grid cells averaged; 0 means nearest-cell fallback
};

struct KernelConfig {
  double n_min = 500.0;    // persons tested within each bandwidth
  double grid_step = 5.0;  // km; also the bandwidth floor
  double truncation = 3.0; // kernel support in bandwidths
  double undefined_below = 1e-12;
};

struct QualityThresholds {
  double good = 200.0;
  double moderate = 50.0;
};

struct Bandwidths {
  std::vector<double> h;    // km, per cluster
  bool degenerate = false;  // fewer than n_min tested overall: h = max pairwise distance
};

/// Throws ConfigError on an empty cluster list or invalid config.
Bandwidths adaptive_bandwidth(std::span<const SurveyCluster> clusters, const KernelConfig& cfg);

struct BBox {
  Point min;
  Point max;
};

/// Bounding box of all department polygons.
BBox hierarchy_bbox(const SpatialHierarchy& h);

struct GridCell {
  Point at;
  double kernel = 0.0;    // sum of weights
  double tested = 0.0;    // literal kernel sum over n_tested
  double positive = 0.0;  // literal kernel sum over n_positive
  double prevalence = 0.0;
  bool defined = false;
};

struct PrevalenceField {
  BBox bbox;
  double step = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<GridCell> cells;  // row-major, y outer
};

/// Grid centres at bbox.min + (i + 0.5) * step. Weight of cluster i at distance d:
/// exp(-d^2 / (2 h_i^2)) / (2 pi h_i^2), zero beyond truncation * h_i.
PrevalenceField estimate_surface(std::span<const SurveyCluster> clusters, const Bandwidths& bw,
                                 const KernelConfig& cfg, const BBox& bbox);

/// Survey persons tested per department, graded by thresholds.
std::vector<Quality> quality_indicator(std::span<const SurveyCluster> clusters, const SpatialHierarchy& h,
                                       const QualityThresholds& t = {});

/// Mean of defined cells inside each polygon. Departments without one take the
/// nearest defined cell and are graded uncertain; others take `grades` (good when empty).
std::vector<HivEstimate> department_prevalence(const PrevalenceField& field, const SpatialHierarchy& h,
                                               std::span<const Quality> grades = {});

void write_surface_tsv(std::ostream& out, const PrevalenceField& f, std::string_view manifest_hash = {});
void write_estimates_tsv(std::ostream& out, std::span<const HivEstimate> est, std::string_view manifest_hash = {});
std::vector<HivEstimate> read_estimates_tsv(std::istream& in);
void write_choropleth_geojson(std::ostream& out, const SpatialHierarchy& h, std::span<const HivEstimate> est,
                              std::string_view manifest_hash = {});

}  // namespace hivmob
