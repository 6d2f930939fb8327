#include "hivmob/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hivmob {

namespace {

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

std::vector<Point> convex_hull(std::span<const Point> points) {
  std::vector<Point> p(points.begin(), points.end());
  std::sort(p.begin(), p.end(), [](Point a, Point b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;
  // Andrew's monotone chain; collinear points are dropped (cross <= 0 pops).
  std::vector<Point> hull(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
    hull[k++] = p[i];
  }
  hull.resize(k - 1);
  return hull;
}

double radius_of_gyration(std::span<const Point> points) {
  if (points.empty()) return 0.0;
  double cx = 0.0, cy = 0.0;
  for (const auto& p : points) {
    cx += p.x;
    cy += p.y;
  }
  const auto n = static_cast<double>(points.size());
  cx /= n;
  cy /= n;
  double acc = 0.0;
  for (const auto& p : points) acc += (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
  return std::sqrt(acc / n);
}

double hull_area(std::span<const Point> hull) {
  if (hull.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point& a = hull[i];
    const Point& b = hull[(i + 1) % hull.size()];
    acc += a.x * b.y - b.x * a.y;
  }
  return std::fabs(acc) * 0.5;
}

double hull_perimeter(std::span<const Point> hull) {
  if (hull.size() < 2) return 0.0;
  if (hull.size() == 2) return 2.0 * dist(hull[0], hull[1]);
  double acc = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) acc += dist(hull[i], hull[(i + 1) % hull.size()]);
  return acc;
}

double diameter(std::span<const Point> points) {
  auto hull = convex_hull(points);
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) best = std::max(best, dist(hull[i], hull[j]));
  }
  return best;
}

SpatialMetrics spatial_metrics(std::span<const Point> points) {
  SpatialMetrics m;
  auto hull = convex_hull(points);
  if (hull.size() < 2) return m;
  m.gyration = radius_of_gyration(points);
  m.area = hull_area(hull);
  m.perimeter = hull_perimeter(hull);
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) m.diameter = std::max(m.diameter, dist(hull[i], hull[j]));
  }
  return m;
}

double path_length(std::span<const Point> points) {
  double acc = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) acc += dist(points[i - 1], points[i]);
  return acc;
}

}  // namespace hivmob
