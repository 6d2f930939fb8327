#include "hivmob/prevalence.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "json.hpp"

#include "hivmob/errors.hpp"
#include "hivmob/numfmt.hpp"
#include "hivmob/parallel.hpp"
#include "hivmob/simd.hpp"

namespace hivmob {

std::string_view to_string(Quality q) {
  switch (q) {
    case Quality::good: return "good";
    case Quality::moderate: return "moderate";
    case Quality::uncertain: return "uncertain";
  }
  return "uncertain";
}

std::optional<Quality> parse_quality(std::string_view s) {
  if (s == "good") return Quality::good;
  if (s == "moderate") return Quality::moderate;
  if (s == "uncertain") return Quality::uncertain;
  return std::nullopt;
}

Bandwidths adaptive_bandwidth(std::span<const SurveyCluster> clusters, const KernelConfig& cfg) {
  if (clusters.empty()) throw ConfigError("adaptive bandwidth needs at least one survey cluster");
  if (!(cfg.n_min >= 1.0)) throw ConfigError("N_min must be at least 1");
  if (!(cfg.grid_step > 0.0)) throw ConfigError("grid_step must be positive");
  const std::size_t n = clusters.size();
  Bandwidths out;
  out.h.assign(n, cfg.grid_step);

  double total = 0.0;
  for (const auto& c : clusters) total += static_cast<double>(c.n_tested);
  if (total < cfg.n_min) {
    double far = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        far = std::max(far, std::hypot(clusters[i].location.x - clusters[j].location.x,
                                       clusters[i].location.y - clusters[j].location.y));
      }
    }
    out.degenerate = true;
    out.h.assign(n, std::max(far, cfg.grid_step));
    return out;
  }

  parallel_for(n, [&](std::size_t i) {
    std::vector<std::pair<double, double>> by_dist(n);  // (distance, tested)
    for (std::size_t j = 0; j < n; ++j) {
      by_dist[j] = {std::hypot(clusters[i].location.x - clusters[j].location.x,
                               clusters[i].location.y - clusters[j].location.y),
                    static_cast<double>(clusters[j].n_tested)};
    }
    std::sort(by_dist.begin(), by_dist.end());
    double acc = 0.0;
    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += by_dist[k].second;
      radius = by_dist[k].first;
      // Clusters at the same distance all enter the disc together.
      if (acc >= cfg.n_min && (k + 1 == n || by_dist[k + 1].first > radius)) break;
    }
    out.h[i] = std::max(radius, cfg.grid_step);
  });
  return out;
}

BBox hierarchy_bbox(const SpatialHierarchy& h) {
  BBox b{{INFINITY, INFINITY}, {-INFINITY, -INFINITY}};
  for (const auto& d : h.departments()) {
    for (const auto& p : d.polygon) {
      b.min.x = std::min(b.min.x, p.x);
      b.min.y = std::min(b.min.y, p.y);
      b.max.x = std::max(b.max.x, p.x);
      b.max.y = std::max(b.max.y, p.y);
    }
  }
  return b;
}

PrevalenceField estimate_surface(std::span<const SurveyCluster> clusters, const Bandwidths& bw,
                                 const KernelConfig& cfg, const BBox& bbox) {
  if (bw.h.size() != clusters.size()) throw ConfigError("one bandwidth per cluster required");
  if (!(cfg.grid_step > 0.0)) throw ConfigError("grid_step must be positive");
  const std::size_t n = clusters.size();
  std::vector<double> x(n), y(n), inv_h2(n), norm(n), cutoff2(n), pos(n), tested(n);
  for (std::size_t i = 0; i < n; ++i) {
    double h = bw.h[i];
    if (!(h > 0.0)) throw ConfigError("bandwidths must be positive");
    x[i] = clusters[i].location.x;
    y[i] = clusters[i].location.y;
    inv_h2[i] = 1.0 / (h * h);
    norm[i] = inv_h2[i] / (2.0 * std::numbers::pi);
    cutoff2[i] = (cfg.truncation * h) * (cfg.truncation * h);
    pos[i] = static_cast<double>(clusters[i].n_positive);
    tested[i] = static_cast<double>(clusters[i].n_tested);
  }
  // The ratio is a weighted mediant of cluster prevalences; clamping to their range
  // only removes rounding excursions.
  double pmin = 1.0, pmax = 0.0;
  for (const auto& c : clusters) {
    if (c.n_tested == 0) continue;
    pmin = std::min(pmin, c.prevalence());
    pmax = std::max(pmax, c.prevalence());
  }
  simd::GaussianSources src{x.data(), y.data(), inv_h2.data(), norm.data(), cutoff2.data(),
                            pos.data(), tested.data(), n};

  PrevalenceField f;
  f.bbox = bbox;
  f.step = cfg.grid_step;
  f.nx = static_cast<std::size_t>(std::max(1.0, std::ceil((bbox.max.x - bbox.min.x) / cfg.grid_step)));
  f.ny = static_cast<std::size_t>(std::max(1.0, std::ceil((bbox.max.y - bbox.min.y) / cfg.grid_step)));
  f.cells.resize(f.nx * f.ny);
  const auto& kernels = simd::active();
  parallel_for(f.ny, [&](std::size_t j) {
    for (std::size_t i = 0; i < f.nx; ++i) {
      GridCell& c = f.cells[j * f.nx + i];
      c.at = {bbox.min.x + (static_cast<double>(i) + 0.5) * cfg.grid_step,
              bbox.min.y + (static_cast<double>(j) + 0.5) * cfg.grid_step};
      auto s = kernels.gaussian_sums(c.at.x, c.at.y, src);
      c.kernel = s.kernel;
      c.tested = s.tested;
      c.positive = s.positive;
      c.defined = s.kernel >= cfg.undefined_below && s.tested > 0.0;
      c.prevalence = c.defined ? std::clamp(s.positive / s.tested, pmin, pmax) : 0.0;
    }
  });
  return f;
}

std::vector<Quality> quality_indicator(std::span<const SurveyCluster> clusters, const SpatialHierarchy& h,
                                       const QualityThresholds& t) {
  std::vector<double> tested(h.department_count(), 0.0);
  for (const auto& c : clusters) {
    if (auto d = h.locate(c.location)) tested[*d] += static_cast<double>(c.n_tested);
  }
  std::vector<Quality> out;
  for (double v : tested) {
    out.push_back(v >= t.good ? Quality::good : v >= t.moderate ? Quality::moderate : Quality::uncertain);
  }
  return out;
}

std::vector<HivEstimate> department_prevalence(const PrevalenceField& field, const SpatialHierarchy& h,
                                               std::span<const Quality> grades) {
  const auto& depts = h.departments();
  if (!grades.empty() && grades.size() != depts.size()) throw ConfigError("one grade per department required");
  std::vector<HivEstimate> out(depts.size());
  parallel_for(depts.size(), [&](std::size_t d) {
    HivEstimate& e = out[d];
    e.department = depts[d].id;
    double sum = 0.0;
    for (const auto& c : field.cells) {
      if (c.defined && point_in_polygon(c.at, depts[d].polygon)) {
        sum += c.prevalence;
        ++e.cells;
      }
    }
    if (e.cells > 0) {
      e.prevalence = sum / static_cast<double>(e.cells);
      e.quality = grades.empty() ? Quality::good : grades[d];
      return;
    }
    double best = INFINITY;
    for (const auto& c : field.cells) {
      if (!c.defined) continue;
      double d2 = (c.at.x - depts[d].centroid.x) * (c.at.x - depts[d].centroid.x) +
                  (c.at.y - depts[d].centroid.y) * (c.at.y - depts[d].centroid.y);
      if (d2 < best) {
        best = d2;
        e.prevalence = c.prevalence;
      }
    }
    e.quality = Quality::uncertain;
  });
  return out;
}

void write_surface_tsv(std::ostream& out, const PrevalenceField& f, std::string_view manifest_hash) {
  if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << '\n';
  out << "x\ty\tprevalence\tdefined\tkernel\ttested\tpositive\n";
  std::string line;
  for (const auto& c : f.cells) {
    line.clear();
    append_double(line, c.at.x);
    line += '\t';
    append_double(line, c.at.y);
    line += '\t';
    if (c.defined) {
      append_double(line, c.prevalence);
    } else {
      line += "NA";
    }
    line += c.defined ? "\t1\t" : "\t0\t";
    append_double(line, c.kernel);
    line += '\t';
    append_double(line, c.tested);
    line += '\t';
    append_double(line, c.positive);
    out << line << '\n';
  }
}

void write_estimates_tsv(std::ostream& out, std::span<const HivEstimate> est, std::string_view manifest_hash) {
  if (!manifest_hash.empty()) out << "# manifest=" << manifest_hash << '\n';
  out << "dept\tprevalence\tquality\tcells\n";
  for (const auto& e : est) {
    out << e.department << '\t' << format_double(e.prevalence) << '\t' << to_string(e.quality) << '\t' << e.cells
        << '\n';
  }
}

std::vector<HivEstimate> read_estimates_tsv(std::istream& in) {
  std::vector<HivEstimate> out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = rtrim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    auto cells = split_tabs(text);
    HivEstimate e;
    std::optional<std::uint64_t> id, n;
    std::optional<double> p;
    std::optional<Quality> q;
    if (cells.size() == 4) {
      id = parse_uint(cells[0]);
      p = parse_double(cells[1]);
      q = parse_quality(cells[2]);
      n = parse_uint(cells[3]);
    }
    if (!id || !p || !q || !n) {
      throw ParseError({{lineno, "malformed estimate row"}},
                       "estimates line " + std::to_string(lineno) + ": malformed estimate row");
    }
    out.push_back({static_cast<DeptId>(*id), *p, *q, static_cast<std::size_t>(*n)});
  }
  return out;
}

void write_choropleth_geojson(std::ostream& out, const SpatialHierarchy& h, std::span<const HivEstimate> est,
                              std::string_view manifest_hash) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  if (!manifest_hash.empty()) doc["manifest"] = manifest_hash;
  doc["features"] = ordered_json::array();
  for (const auto& e : est) {
    auto d = h.department_index(e.department);
    if (!d) continue;
    const auto& info = h.departments()[*d];
    ordered_json ring = ordered_json::array();
    for (const auto& p : info.polygon) ring.push_back({p.x, p.y});
    if (!info.polygon.empty()) ring.push_back({info.polygon.front().x, info.polygon.front().y});
    ordered_json f;
    f["type"] = "Feature";
    f["properties"] = {{"dept", e.department}, {"name", info.name}, {"prevalence", e.prevalence},
                       {"quality", to_string(e.quality)}};
    f["geometry"] = {{"type", "Polygon"}, {"coordinates", ordered_json::array({ring})}};
    doc["features"].push_back(std::move(f));
  }
  out << doc.dump(1) << '\n';
}

}  // namespace hivmob
