#pragma once

#include <span>
#include <vector>

#include "hivmob/hierarchy.hpp"

namespace hivmob {

struct SpatialMetrics {
  double gyration = 0.0;   // km
  double area = 0.0;       // km^2
  double perimeter = 0.0;  // km
  double diameter = 0.0;   // km
};

/// Counter-clockwise hull without repeated or collinear vertices.
std::vector<Point> convex_hull(std::span<const Point> points);

double radius_of_gyration(std::span<const Point> points);
/// Hull area; 0 for fewer than three non-collinear points.
double hull_area(std::span<const Point> hull);
/// Hull boundary length; a two-vertex hull counts its segment twice.
double hull_perimeter(std::span<const Point> hull);
/// Largest pairwise distance (computed over the hull vertices).
double diameter(std::span<const Point> points);

/// All four metrics; fewer than two distinct points gives zeros.
SpatialMetrics spatial_metrics(std::span<const Point> points);

/// Sum of distances between consecutive points.
double path_length(std::span<const Point> points);

}  // namespace hivmob
