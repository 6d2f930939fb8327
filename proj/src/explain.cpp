#include "hivmob/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hivmob/errors.hpp"
#include "hivmob/parallel.hpp"
#include "hivmob/rng.hpp"

namespace hivmob {

void ContributionConfig::check() const {
  if (m < 2) throw ConfigError("contribution curves need at least two probe points");
  if (iterations < 1) throw ConfigError("contribution curves need at least one iteration");
}

std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::positive: return "positive";
    case Sign::negative: return "negative";
    case Sign::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

ContributionCurve contribution_curve(const FittedModel& model, const Matrix& data, std::size_t feature,
                                     const ContributionConfig& cfg, std::string name) {
  cfg.check();
  if (feature >= data.cols()) throw ConfigError("feature index out of range");
  if (data.rows() == 0) throw ConfigError("contribution curves need data rows");
  ContributionCurve curve;
  curve.feature = feature;
  curve.name = std::move(name);

  const auto column = data.column(feature);
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  if (*lo == *hi) {
    curve.degenerate = true;
    curve.probes = {*lo};
  } else {
    curve.probes.resize(cfg.m);
    for (std::size_t k = 0; k < cfg.m; ++k) {
      curve.probes[k] = *lo + (*hi - *lo) * static_cast<double>(k) / static_cast<double>(cfg.m - 1);
    }
    curve.probes.back() = *hi;
  }

  // Baseline instances over the model's inputs only.
  const std::size_t q = model.features.size();
  const std::size_t n = data.rows();
  std::vector<double> base(cfg.iterations * q);
  std::vector<double> f_base(cfg.iterations);
  parallel_for(cfg.iterations, [&](std::size_t it) {
    Engine eng = make_stream(cfg.seed, {stream_tag::contribution, feature, it});
    double* inst = base.data() + it * q;
    if (cfg.joint_rows) {
      std::size_t r = uniform_index(eng, n);
      for (std::size_t k = 0; k < q; ++k) inst[k] = data(r, model.features[k]);
    } else {
      for (std::size_t k = 0; k < q; ++k) inst[k] = data(uniform_index(eng, n), model.features[k]);
    }
    f_base[it] = model.fit.predict({inst, q});
  });

  std::optional<std::size_t> slot;
  for (std::size_t k = 0; k < q; ++k) {
    if (model.features[k] == feature) slot = k;
  }
  const auto iters = static_cast<double>(cfg.iterations);
  std::vector<double> inst(q), diff(cfg.iterations);
  for (double v : curve.probes) {
    double sum = 0.0;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
      if (!slot) {
        diff[it] = 0.0;
        continue;
      }
      std::copy_n(base.begin() + static_cast<std::ptrdiff_t>(it * q), q, inst.begin());
      inst[*slot] = v;
      diff[it] = model.fit.predict(inst) - f_base[it];
      sum += diff[it];
    }
    double mean = sum / iters;
    double ss = 0.0;
    for (double d : diff) ss += (d - mean) * (d - mean);
    double sd = cfg.iterations > 1 ? std::sqrt(ss / (iters - 1.0)) : 0.0;
    curve.mean.push_back(mean);
    curve.std.push_back(sd);
    curve.sign.push_back(std::fabs(mean) <= sd ? Sign::indeterminate : mean > 0.0 ? Sign::positive : Sign::negative);
  }
  return curve;
}

std::vector<std::size_t> top_features(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                                      std::size_t k) {
  if (k > x.cols()) throw ConfigError("cannot keep more features than the matrix has");
  return rfe(spec, x, y, k).selected;
}

std::vector<SignRange> classify_ranges(const ContributionCurve& curve) {
  std::vector<SignRange> out;
  for (std::size_t i = 0; i < curve.probes.size(); ++i) {
    if (!out.empty() && out.back().sign == curve.sign[i]) {
      out.back().last = i;
      out.back().to = curve.probes[i];
    } else {
      out.push_back({curve.sign[i], i, i, curve.probes[i], curve.probes[i]});
    }
  }
  return out;
}

std::string readout(const ContributionCurve& curve) {
  if (curve.mean.empty()) return {};
  double m = curve.mean.back(), s = curve.std.back();
  char buf[160];
  std::snprintf(buf, sizeof buf, "at the maximum observed value, expected prevalence is %.3g +- %.3g %s than average",
                std::fabs(m), s, m >= 0.0 ? "higher" : "lower");
  return buf;
}

}  // namespace hivmob
