#include "hivmob/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hivmob/errors.hpp"
#include "hivmob/linalg.hpp"
#include "hivmob/parallel.hpp"
#include "hivmob/ridge.hpp"
#include "hivmob/rng.hpp"
#include "hivmob/svr.hpp"

namespace hivmob {

std::string_view to_string(Method m) { return m == Method::ridge ? "ridge" : "svr"; }
std::optional<Method> parse_method(std::string_view s) {
  if (s == "ridge") return Method::ridge;
  if (s == "svr") return Method::svr;
  return std::nullopt;
}
std::string_view to_string(Reselect r) { return r == Reselect::per_round ? "per_round" : "once"; }
std::optional<Reselect> parse_reselect(std::string_view s) {
  if (s == "per_round") return Reselect::per_round;
  if (s == "once") return Reselect::once;
  return std::nullopt;
}
std::string_view to_string(Protocol p) { return p == Protocol::nested ? "nested" : "global"; }
std::optional<Protocol> parse_protocol(std::string_view s) {
  if (s == "nested") return Protocol::nested;
  if (s == "global") return Protocol::global;
  return std::nullopt;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (count == 0 || !(lo > 0.0) || !(hi >= lo)) throw ConfigError("log grid needs 0 < lo <= hi and count >= 1");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_grid(Method m) {
  return m == Method::ridge ? log_grid(1e-4, 1e4, 9) : log_grid(1e-3, 1e3, 9);
}

std::span<const double> ModelSpec::effective_grid() const {
  if (!grid.empty()) return grid;
  static const std::vector<double> ridge = default_grid(Method::ridge);
  static const std::vector<double> svr = default_grid(Method::svr);
  return method == Method::ridge ? ridge : svr;
}

void ModelSpec::check() const {
  for (double v : grid) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("hyperparameter grid values must be positive and finite");
  }
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be >= 0");
  if (rfe_target && *rfe_target == 0) throw ConfigError("RFE target must be at least 1");
}

Matrix normalize_columns(const Matrix& x) {
  Matrix out = x;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= static_cast<double>(x.rows());
    if (mean == 0.0 || !std::isfinite(mean)) continue;
    for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = x(r, c) / mean;
  }
  return out;
}

LinearFit fit_linear(Method m, const Matrix& x, std::span<const double> y, double hyper, double epsilon) {
  if (m == Method::ridge) return fit_ridge(x, y, hyper);
  return fit_svr(x, y, hyper, {.epsilon = epsilon});
}

namespace {

std::vector<std::size_t> all_but(std::size_t n, std::size_t skip) {
  std::vector<std::size_t> out;
  out.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != skip) out.push_back(i);
  }
  return out;
}

// Ridge LOO residuals from the hat matrix: with G = Xc Xc^T and M = (G + lambda I + 11^T)^-1
// (the ones direction carries no signal since Xc and yc are centred), the residual of
// row i is alpha_i / (M_ii - 1/(n (lambda + n))) with alpha = M yc.
double ridge_loo_mse_closed(const Matrix& x, std::span<const double> y, double lambda) {
  const std::size_t n = x.rows(), p = x.cols();
  Matrix xc = x;
  for (std::size_t c = 0; c < p; ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < n; ++r) m += x(r, c);
    m /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) xc(r, c) -= m;
  }
  double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> yc(n);
  for (std::size_t r = 0; r < n; ++r) yc[r] = y[r] - my;
  Matrix a = gram_rows(xc);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) += 1.0;
    a(i, i) += lambda;
  }
  Matrix l = a;
  if (!cholesky(l)) throw NumericalError("ridge LOO system is not positive definite");
  auto alpha = cholesky_solve(l, yc);
  const double shift = 1.0 / (static_cast<double>(n) * (lambda + static_cast<double>(n)));
  double acc = 0.0;
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(e.begin(), e.end(), 0.0);
    e[i] = 1.0;
    double mii = cholesky_solve(l, e)[i];
    double denom = mii - shift;
    double r = alpha[i] / denom;
    acc += r * r;
  }
  return acc / static_cast<double>(n);
}

Matrix center_columns(const Matrix& x) {
  Matrix xc = x;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) m += x(r, c);
    m /= static_cast<double>(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) xc(r, c) -= m;
  }
  return xc;
}

// LOO predictions of an SVR from sub-blocks of one Gram matrix.
std::vector<double> svr_loo_predictions(const Matrix& gram, std::span<const double> y, double c, double epsilon) {
  const std::size_t n = y.size();
  std::vector<double> pred(n);
  // Each fold starts from the full solution without row i; the removed coefficient is
  // absorbed by shrinking the opposite-signed ones toward zero, which keeps the start feasible.
  const auto full = solve_svr_gram(gram, y, c, {.epsilon = epsilon}).dual;
  std::vector<double> start(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto keep = all_but(n, i);
    double excess = full[i];
    for (std::size_t a = 0; a < keep.size(); ++a) {
      double b = full[keep[a]];
      if (excess > 0.0 && b < 0.0) {
        double t = std::min(excess, -b);
        b += t;
        excess -= t;
      } else if (excess < 0.0 && b > 0.0) {
        double t = std::min(-excess, b);
        b -= t;
        excess += t;
      }
      start[a] = b;
    }
    Matrix sub(n - 1, n - 1);
    std::vector<double> ys(n - 1);
    for (std::size_t a = 0; a < keep.size(); ++a) {
      ys[a] = y[keep[a]];
      for (std::size_t b = 0; b < keep.size(); ++b) sub(a, b) = gram(keep[a], keep[b]);
    }
    auto sol = solve_svr_gram(sub, ys, c, {.epsilon = epsilon, .start = start});
    double f = sol.bias;
    for (std::size_t a = 0; a < keep.size(); ++a) f += sol.dual[a] * gram(i, keep[a]);
    pred[i] = f;
  }
  return pred;
}

bool stronger(Method m, double a, double b) { return m == Method::ridge ? a > b : a < b; }

}  // namespace

double loo_mse(Method m, const Matrix& x, std::span<const double> y, double hyper, double epsilon) {
  const std::size_t n = x.rows();
  if (n < 3) throw ConfigError("leave-one-out needs at least three rows");
  if (m == Method::ridge && hyper > 0.0) return ridge_loo_mse_closed(x, y, hyper);
  if (m == Method::svr) {
    auto pred = svr_loo_predictions(gram_rows(center_columns(x)), y, hyper, epsilon);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (pred[i] - y[i]) * (pred[i] - y[i]);
    return acc / static_cast<double>(n);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto keep = all_but(n, i);
    Matrix xs = x.select_rows(keep);
    std::vector<double> ys;
    for (std::size_t k : keep) ys.push_back(y[k]);
    auto fit = fit_ridge(xs, ys, hyper);
    double r = fit.predict(x.row(i)) - y[i];
    acc += r * r;
  }
  return acc / static_cast<double>(n);
}

double loo_select(const ModelSpec& spec, const Matrix& x, std::span<const double> y) {
  spec.check();
  auto grid = spec.effective_grid();
  if (grid.empty()) throw ConfigError("hyperparameter grid is empty");
  if (grid.size() == 1) return grid[0];
  std::vector<double> mse(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) mse[g] = loo_mse(spec.method, x, y, grid[g], spec.epsilon);
  const double best = *std::min_element(mse.begin(), mse.end());
  std::optional<double> chosen;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (mse[g] <= best * (1.0 + 1e-12) && (!chosen || stronger(spec.method, grid[g], *chosen))) chosen = grid[g];
  }
  return *chosen;
}

RfeResult rfe(const ModelSpec& spec, const Matrix& x, std::span<const double> y, std::size_t target) {
  const std::size_t p = x.cols();
  if (target < 1 || target > p) throw ConfigError("RFE target must lie in [1, feature count]");
  RfeResult out;
  out.selected.resize(p);
  std::iota(out.selected.begin(), out.selected.end(), std::size_t{0});
  std::optional<double> fixed;
  if (spec.reselect == Reselect::once) fixed = loo_select(spec, x, y);
  for (;;) {
    Matrix xs = x.select_cols(out.selected);
    out.hyper = fixed ? *fixed : loo_select(spec, xs, y);
    if (out.selected.size() == target) break;
    auto fit = fit_linear(spec.method, xs, y, out.hyper, spec.epsilon);
    std::size_t drop = 0;
    for (std::size_t k = 1; k < fit.coef.size(); ++k) {
      if (std::fabs(fit.coef[k]) <= std::fabs(fit.coef[drop])) drop = k;
    }
    out.elimination_order.push_back(out.selected[drop]);
    out.selected.erase(out.selected.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return out;
}

double FittedModel::predict(std::span<const double> row) const {
  double s = fit.intercept;
  for (std::size_t k = 0; k < features.size(); ++k) s += fit.coef[k] * row[features[k]];
  return s;
}

FittedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y) {
  spec.check();
  FittedModel m;
  m.method = spec.method;
  if (spec.rfe_target && *spec.rfe_target < x.cols()) {
    auto r = rfe(spec, x, y, *spec.rfe_target);
    m.features = r.selected;
    m.elimination_order = r.elimination_order;
    m.hyper = r.hyper;
  } else {
    m.features.resize(x.cols());
    std::iota(m.features.begin(), m.features.end(), std::size_t{0});
    m.hyper = loo_select(spec, x, y);
  }
  m.fit = fit_linear(spec.method, x.select_cols(m.features), y, m.hyper, spec.epsilon);
  return m;
}

Metrics compute_metrics(std::span<const double> pred, std::span<const double> actual) {
  const std::size_t n = actual.size();
  Metrics m;
  if (n == 0) {
    m.rho_undefined = true;
    return m;
  }
  double mp = 0.0, ma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mp += pred[i];
    ma += actual[i];
  }
  mp /= static_cast<double>(n);
  ma /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0, se = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dp = pred[i] - mp, da = actual[i] - ma;
    sxy += dp * da;
    sxx += dp * dp;
    syy += da * da;
    se += (pred[i] - actual[i]) * (pred[i] - actual[i]);
  }
  if (n < 2 || sxx == 0.0 || syy == 0.0) {
    m.rho_undefined = true;
  } else {
    m.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  }
  m.rrmse = std::sqrt(se / static_cast<double>(n)) / ma;
  return m;
}

EvaluationReport loo_evaluate(const ModelSpec& spec, const Matrix& x_raw, std::span<const double> y) {
  spec.check();
  const std::size_t n = x_raw.rows();
  if (n < 3) throw ConfigError("leave-one-out evaluation needs at least three rows");
  if (y.size() != n) throw ConfigError("target length does not match the rows");
  const Matrix x = spec.normalize ? normalize_columns(x_raw) : x_raw;

  EvaluationReport rep;
  rep.method = spec.method;
  rep.actual.assign(y.begin(), y.end());
  rep.predictions.resize(n);
  rep.folds.resize(n);

  std::optional<FittedModel> global;
  if (spec.protocol == Protocol::global) global = fit_model(spec, x, y);

  parallel_for(n, [&](std::size_t i) {
    auto keep = all_but(n, i);
    Matrix xs = x.select_rows(keep);
    std::vector<double> ys;
    for (std::size_t k : keep) ys.push_back(y[k]);
    FittedModel m;
    if (global) {
      m = *global;
      m.fit = fit_linear(spec.method, xs.select_cols(m.features), ys, m.hyper, spec.epsilon);
    } else {
      m = fit_model(spec, xs, ys);
    }
    rep.predictions[i] = m.predict(x.row(i));
    rep.folds[i] = std::move(m);
  });
  rep.metrics = compute_metrics(rep.predictions, rep.actual);
  return rep;
}

Matrix permute_columns(const Matrix& x, std::uint64_t seed) {
  Matrix out = x;
  const std::size_t n = x.rows();
  for (std::size_t c = 0; c < x.cols(); ++c) {
    Engine eng = make_stream(seed, {stream_tag::permutation, c});
    for (std::size_t i = n; i > 1; --i) {
      std::size_t j = uniform_index(eng, i);
      std::swap(out(i - 1, c), out(j, c));
    }
  }
  return out;
}

std::vector<EvaluationReport> permutation_baseline(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                                                   std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ConfigError("permutation baseline needs at least one seed");
  std::vector<EvaluationReport> out(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    out[s] = loo_evaluate(spec, permute_columns(x, seeds[s]), y);
    out[s].permuted = true;
    out[s].seed = seeds[s];
  });
  return out;
}

std::size_t best_random(std::span<const EvaluationReport> reports) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].metrics.rho > reports[best].metrics.rho) best = i;
  }
  return best;
}

StackResult stack_ensemble(std::span<const std::vector<double>> base, std::span<const double> y) {
  const std::size_t k = base.size(), n = y.size();
  for (const auto& b : base) {
    if (b.size() != n) throw ConfigError("base prediction vectors must match the target length");
  }
  StackResult out;
  out.weights.assign(k, 0.0);
  out.predictions.assign(n, 0.0);
  Matrix a(n, k);
  bool any = false;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      a(i, j) = base[j][i];
      any = any || base[j][i] != 0.0;
    }
  }
  if (!any) {
    out.degenerate = true;
    out.metrics = compute_metrics(out.predictions, y);
    return out;
  }
  auto sol = nnls(a, y);
  // Identical columns: the group total is determined, its split is not; split it evenly.
  std::vector<bool> done(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    if (done[j]) continue;
    std::vector<std::size_t> group{j};
    for (std::size_t l = j + 1; l < k; ++l) {
      if (!done[l] && base[l] == base[j]) group.push_back(l);
    }
    double total = 0.0;
    for (std::size_t g : group) {
      total += sol.x[g];
      done[g] = true;
    }
    for (std::size_t g : group) out.weights[g] = total / static_cast<double>(group.size());
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) out.predictions[i] += out.weights[j] * base[j][i];
  }
  out.metrics = compute_metrics(out.predictions, y);
  return out;
}

}  // namespace hivmob
