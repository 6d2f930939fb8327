#include "hivmob/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "hivmob/errors.hpp"
#include "hivmob/linalg.hpp"
#include "hivmob/numfmt.hpp"

namespace hivmob {

double optimal_bias(std::span<const double> r, double eps) {
  // The objective is convex piecewise linear with breakpoints r_i +- eps. Its slope
  // just right of t is #(r_i + eps <= t) - #(r_i - eps > t); just left of t it is
  // #(r_i + eps < t) - #(r_i - eps >= t). Minimisers are [lo, hi] with lo the
  // first breakpoint whose right slope is >= 0 and hi the last whose left slope is <= 0.
  std::vector<double> pts;
  pts.reserve(2 * r.size());
  for (double v : r) {
    pts.push_back(v - eps);
    pts.push_back(v + eps);
  }
  std::sort(pts.begin(), pts.end());
  auto right_slope = [&](double t) {
    long s = 0;
    for (double v : r) s += (v + eps <= t) - (v - eps > t);
    return s;
  };
  auto left_slope = [&](double t) {
    long s = 0;
    for (double v : r) s += (v + eps < t) - (v - eps >= t);
    return s;
  };
  double lo = pts.front(), hi = pts.back();
  for (double t : pts) {
    if (right_slope(t) >= 0) {
      lo = t;
      break;
    }
  }
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    if (left_slope(*it) <= 0) {
      hi = *it;
      break;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

struct Objectives {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;  // primal - dual, formed before rounding
  double bias = 0.0;
};

// Objectives accumulated in long double: with large C the two sides are big and
// nearly equal, and double sums would bury a 1e-6 gap in rounding.
template <typename T>
Objectives evaluate(const Matrix& k, std::span<const double> y, std::span<const T> a, double c, double eps) {
  const std::size_t n = y.size();
  std::vector<long double> coef(n), f(n, 0.0L);
  for (std::size_t i = 0; i < n; ++i) coef[i] = static_cast<long double>(a[i]) - static_cast<long double>(a[n + i]);
  long double norm2 = 0.0L, lin = 0.0L, l1 = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) f[i] += static_cast<long double>(k(i, j)) * coef[j];
  }
  for (std::size_t i = 0; i < n; ++i) {
    norm2 += coef[i] * f[i];
    lin += static_cast<long double>(y[i]) * coef[i];
    l1 += static_cast<long double>(a[i]) + static_cast<long double>(a[n + i]);
  }
  norm2 = std::max(norm2, 0.0L);
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<double>(static_cast<long double>(y[i]) - f[i]);
  Objectives o;
  o.bias = optimal_bias(r, eps);
  long double loss = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    loss += std::max(0.0L, std::fabs(static_cast<long double>(y[i]) - f[i] - o.bias) - eps);
  }
  o.primal = static_cast<double>(0.5L * norm2 + c * loss);
  o.gap = static_cast<double>(0.5L * norm2 + c * loss + (0.5L * norm2 + eps * l1 - lin));
  o.dual = o.primal - o.gap;
  return o;
}

// Exact finisher for the dual QP
//   min 0.5 z'Qz + q'z  s.t.  s'z = 0,  0 <= z <= c
// by a primal active-set method started from a feasible z. The reduced Hessian of a
// face may be singular (rank-deficient Gram matrices are the norm when features are
// fewer than rows); then a zero-curvature descent direction is followed to a bound.
class ActiveSet {
 public:
  ActiveSet(const Matrix& k, std::span<const double> y, double c, double eps)
      : k_(k.data().begin(), k.data().end()), n_(y.size()), c_(c), q_(2 * y.size()) {
    for (std::size_t i = 0; i < n_; ++i) {
      q_[i] = eps - y[i];
      q_[n_ + i] = eps + y[i];
    }
  }

  // Returns false when the iteration budget ran out (z is still feasible and no worse).
  bool run(std::vector<long double>& z) {
    const std::size_t m = 2 * n_;
    // Working set: 0 free, 1 at zero, 2 at c.
    std::vector<int> w(m, 0);
    for (std::size_t t = 0; t < m; ++t) {
      if (z[t] <= 0.0L) {
        z[t] = 0.0L;
        w[t] = 1;
      } else if (z[t] >= c_) {
        z[t] = c_;
        w[t] = 2;
      }
    }
    std::vector<long double> g(m), d(m);
    const std::size_t budget = 50 * m + 100;
    for (std::size_t it = 0; it < budget; ++it) {
      gradient(z, g);
      long double gscale = 1.0L;
      for (long double v : g) gscale = std::max(gscale, std::fabs(v));
      std::vector<std::size_t> free;
      for (std::size_t t = 0; t < m; ++t) {
        if (w[t] == 0) free.push_back(t);
      }
      bool moved = direction(free, g, gscale, d);
      if (moved) {
        // Ratio test against the bounds of the free variables.
        long double step = newton_ ? 1.0L : std::numeric_limits<long double>::infinity();
        std::size_t block = m;
        for (std::size_t t : free) {
          if (d[t] < 0.0L) {
            long double r = -z[t] / d[t];
            if (r < step) step = r, block = t;
          } else if (d[t] > 0.0L) {
            long double r = (c_ - z[t]) / d[t];
            if (r < step) step = r, block = t;
          }
        }
        if (block == m && !newton_) return false;  // cannot happen in a box
        for (std::size_t t : free) z[t] += step * d[t];
        if (block != m) {
          w[block] = d[block] < 0.0L ? 1 : 2;
          z[block] = w[block] == 1 ? 0.0L : c_;
        }
        continue;
      }
      // Stationary on the face: check the bound multipliers.
      long double nu = 0.0L;
      if (!free.empty()) {
        for (std::size_t t : free) nu += sign(t) * g[t];
        nu /= static_cast<long double>(free.size());
      } else {
        long double lo = -std::numeric_limits<long double>::infinity(), hi = -lo;
        for (std::size_t t = 0; t < m; ++t) {
          // at zero: g - nu s >= 0; at c: g - nu s <= 0
          long double v = g[t] * sign(t);
          bool upper_nu = (w[t] == 1) == (sign(t) > 0);
          if (upper_nu) hi = std::min(hi, v); else lo = std::max(lo, v);
        }
        nu = std::isfinite(lo) && std::isfinite(hi) ? 0.5L * (lo + hi) : (std::isfinite(lo) ? lo : hi);
      }
      const long double tol = 1e-13L * gscale;
      std::size_t worst = m;
      long double worst_v = tol;
      for (std::size_t t = 0; t < m; ++t) {
        if (w[t] == 0) continue;
        long double mu = g[t] - nu * sign(t);
        long double viol = w[t] == 1 ? -mu : mu;
        if (viol > worst_v) worst_v = viol, worst = t;
      }
      if (worst == m) return true;
      w[worst] = 0;
    }
    return false;
  }

 private:
  long double sign(std::size_t t) const { return t < n_ ? 1.0L : -1.0L; }
  std::size_t base(std::size_t t) const { return t < n_ ? t : t - n_; }
  long double qm(std::size_t s, std::size_t t) const { return sign(s) * sign(t) * k_[base(s) * n_ + base(t)]; }

  void gradient(const std::vector<long double>& z, std::vector<long double>& g) const {
    std::vector<long double> beta(n_);
    for (std::size_t i = 0; i < n_; ++i) beta[i] = z[i] - z[n_ + i];
    for (std::size_t i = 0; i < n_; ++i) {
      // Two chains halve the x87 add latency; the order is fixed, so results stay deterministic.
      const long double* row = k_.data() + i * n_;
      long double f0 = 0.0L, f1 = 0.0L;
      std::size_t j = 0;
      for (; j + 1 < n_; j += 2) {
        f0 += row[j] * beta[j];
        f1 += row[j + 1] * beta[j + 1];
      }
      if (j < n_) f0 += row[j] * beta[j];
      const long double f = f0 + f1;
      g[i] = q_[i] + f;
      g[n_ + i] = q_[n_ + i] - f;
    }
  }

  // Step direction on the face of the free variables; false when the face is stationary.
  // Sets newton_ to tell a Newton step (length <= 1) from a zero-curvature ray.
  bool direction(const std::vector<std::size_t>& free, const std::vector<long double>& g, long double gscale,
                 std::vector<long double>& d) {
    std::fill(d.begin(), d.end(), 0.0L);
    newton_ = true;
    if (free.size() < 2) return false;
    // Basis of {s'd = 0}: columns e_k - s_0 s_k e_0 for the free k after the first.
    const std::size_t f0 = free[0], r = free.size() - 1;
    std::vector<long double> h(r * r), rg(r);
    for (std::size_t a = 0; a < r; ++a) {
      const std::size_t ka = free[a + 1];
      const long double sa = sign(f0) * sign(ka);
      rg[a] = g[ka] - sa * g[f0];
      for (std::size_t b = 0; b < r; ++b) {
        const std::size_t kb = free[b + 1];
        const long double sb = sign(f0) * sign(kb);
        h[a * r + b] = qm(ka, kb) - sb * qm(ka, f0) - sa * qm(f0, kb) + sa * sb * qm(f0, f0);
      }
    }
    // Pivoted Cholesky in double on the lower triangle with symmetric swaps; the trailing
    // block after `rank` is numerically zero. Solves are refined once against the long
    // double h, so the factor only needs to be a good preconditioner.
    std::vector<std::size_t> perm(r);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    long double dmax = 0.0L;
    for (std::size_t a = 0; a < r; ++a) dmax = std::max(dmax, h[a * r + a]);
    const double floor = static_cast<double>(1e-11L * std::max(dmax, 1e-300L));
    std::vector<double> w(r * r), col(r);
    for (std::size_t t = 0; t < r * r; ++t) w[t] = static_cast<double>(h[t]);
    auto at = [&](std::size_t a, std::size_t b) -> double& { return w[a * r + b]; };
    std::size_t rank = 0;
    for (; rank < r; ++rank) {
      std::size_t piv = rank;
      for (std::size_t a = rank + 1; a < r; ++a) {
        if (at(a, a) > at(piv, piv)) piv = a;
      }
      if (!(at(piv, piv) > floor)) break;
      if (piv != rank) {
        const std::size_t i = rank, j = piv;
        std::swap(perm[i], perm[j]);
        std::swap(at(i, i), at(j, j));
        for (std::size_t b = 0; b < i; ++b) std::swap(at(i, b), at(j, b));
        for (std::size_t t = i + 1; t < j; ++t) std::swap(at(t, i), at(j, t));
        for (std::size_t a = j + 1; a < r; ++a) std::swap(at(a, i), at(a, j));
      }
      const double root = std::sqrt(at(rank, rank));
      at(rank, rank) = root;
      for (std::size_t a = rank + 1; a < r; ++a) col[a] = at(a, rank) /= root;
      for (std::size_t a = rank + 1; a < r; ++a) {
        const double la = col[a];
        double* row = w.data() + a * r;
        for (std::size_t b = rank + 1; b <= a; ++b) row[b] -= la * col[b];
      }
    }
    auto solve_factor = [&](std::vector<double>& v) {
      for (std::size_t a = 0; a < rank; ++a) {
        for (std::size_t b = 0; b < a; ++b) v[a] -= w[a * r + b] * v[b];
        v[a] /= w[a * r + a];
      }
      for (std::size_t a = rank; a-- > 0;) {
        for (std::size_t b = a + 1; b < rank; ++b) v[a] -= w[b * r + a] * v[b];
        v[a] /= w[a * r + a];
      }
    };
    // Solves H11 x = v for the leading `rank` permuted block.
    auto solve11 = [&](const std::vector<long double>& v) {
      std::vector<double> x(rank), res(rank);
      for (std::size_t a = 0; a < rank; ++a) x[a] = static_cast<double>(v[a]);
      solve_factor(x);
      for (std::size_t a = 0; a < rank; ++a) {
        long double s = v[a];
        for (std::size_t b = 0; b < rank; ++b) s -= h[perm[a] * r + perm[b]] * static_cast<long double>(x[b]);
        res[a] = static_cast<double>(s);
      }
      solve_factor(res);
      std::vector<long double> out(rank);
      for (std::size_t a = 0; a < rank; ++a) out[a] = static_cast<long double>(x[a]) + res[a];
      return out;
    };
    std::vector<long double> r1(rank);
    for (std::size_t a = 0; a < rank; ++a) r1[a] = rg[perm[a]];
    auto h11r = solve11(r1);
    std::vector<long double> u(r, 0.0L);
    // Projected gradient on the null directions N_q = e_q - H11^-1 H12 e_q.
    std::vector<long double> rho(r, 0.0L);
    long double rho_max = 0.0L;
    for (std::size_t a = rank; a < r; ++a) {
      long double v = rg[perm[a]];
      for (std::size_t b = 0; b < rank; ++b) v -= h[perm[a] * r + perm[b]] * h11r[b];
      rho[a] = v;
      rho_max = std::max(rho_max, std::fabs(v));
    }
    if (rho_max > 1e-13L * gscale) {
      newton_ = false;
      for (std::size_t a = rank; a < r; ++a) {
        if (rho[a] == 0.0L) continue;
        std::vector<long double> col(rank);
        for (std::size_t b = 0; b < rank; ++b) col[b] = h[perm[b] * r + perm[a]];
        auto x = solve11(col);
        u[perm[a]] += -rho[a];
        for (std::size_t b = 0; b < rank; ++b) u[perm[b]] -= -rho[a] * x[b];
      }
    } else {
      for (std::size_t a = 0; a < rank; ++a) u[perm[a]] = -h11r[a];
    }
    long double umax = 0.0L;
    for (std::size_t a = 0; a < r; ++a) {
      const std::size_t ka = free[a + 1];
      d[ka] = u[a];
      d[f0] -= sign(f0) * sign(ka) * u[a];
      umax = std::max(umax, std::fabs(u[a]));
    }
    return umax > 1e-15L * std::max<long double>(1.0L, c_);
  }

  std::vector<long double> k_;  // row-major copy of the Gram matrix
  std::size_t n_;
  long double c_;
  std::vector<long double> q_;
  bool newton_ = true;
};

void exact_gradient(const Matrix& k, std::span<const double> y, std::span<const double> a, double eps,
                    std::vector<double>& g) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j) f += k(i, j) * (a[j] - a[n + j]);
    g[i] = eps - y[i] + f;
    g[n + i] = eps + y[i] - f;
  }
}

}  // namespace

SvrDual solve_svr_gram(const Matrix& k, std::span<const double> y, double c, const SvrOptions& opts) {
  const std::size_t n = y.size();
  if (k.rows() != n || k.cols() != n) throw ConfigError("gram matrix does not match the target");
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("SVR C must be positive and finite");
  if (!(opts.epsilon >= 0.0)) throw ConfigError("SVR epsilon must be >= 0");
  SvrDual out;
  if (n == 0) return out;

  // Variables t < n are alpha_t (sign +1), t >= n are alpha*_{t-n} (sign -1).
  const std::size_t m = 2 * n;
  auto sign = [n](std::size_t t) { return t < n ? 1.0 : -1.0; };
  auto base = [n](std::size_t t) { return t < n ? t : t - n; };
  auto q = [&](std::size_t s, std::size_t t) { return sign(s) * sign(t) * k(base(s), base(t)); };
  std::vector<double> a(m, 0.0), g(m);
  if (!opts.start.empty()) {
    if (opts.start.size() != n) throw ConfigError("SVR start does not match the target");
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const double b = opts.start[i];
      if (!(std::fabs(b) <= c)) throw ConfigError("SVR start lies outside [-C, C]");
      a[i] = std::max(b, 0.0);
      a[n + i] = std::max(-b, 0.0);
      sum += b;
    }
    if (std::fabs(sum) > 1e-9L * std::max<long double>(1.0L, c)) throw ConfigError("SVR start does not sum to zero");
  }
  exact_gradient(k, y, a, opts.epsilon, g);

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, std::fabs(y[i]), k(i, i)});
  double tol = 1e-3 * std::max(1.0, scale);
  constexpr double kTau = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();

  // Records a certified solution; the dual coefficients are formed before rounding.
  auto accept = [&](const Objectives& o, auto z) {
    out.bias = o.bias;
    out.primal = o.primal;
    out.gap = std::max(0.0, o.gap);
    out.dual.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      out.dual[t] = static_cast<double>(static_cast<long double>(z[t]) - static_cast<long double>(z[n + t]));
    }
  };
  // Exact active-set finish from the current point; true when it certifies the gap.
  auto finish = [&] {
    std::vector<long double> z(a.begin(), a.end());
    ActiveSet(k, y, c, opts.epsilon).run(z);
    auto o = evaluate(k, y, std::span<const long double>(z), c, opts.epsilon);
    if (o.gap > opts.gap_tolerance) return false;
    accept(o, std::span<const long double>(z));
    return true;
  };

  // SMO crawls on nearly interpolating problems (C large, features ~ rows); the exact
  // finisher is tried on a doubling schedule and ends the run once it certifies the gap.
  std::size_t iter = 0, next_finish = 2 * m;
  for (;;) {
    if (iter >= next_finish) {
      if (finish()) break;
      next_finish *= 2;
    }
    // Second-order working set selection.
    double gmax = -inf, gmax2 = -inf;
    std::size_t i = m, j = m;
    for (std::size_t t = 0; t < m; ++t) {
      if (sign(t) > 0 ? a[t] < c : a[t] > 0.0) {
        if (-sign(t) * g[t] >= gmax) {
          gmax = -sign(t) * g[t];
          i = t;
        }
      }
    }
    double obj_min = inf;
    for (std::size_t t = 0; t < m && i < m; ++t) {
      if (!(sign(t) > 0 ? a[t] > 0.0 : a[t] < c)) continue;
      double v = sign(t) * g[t];
      gmax2 = std::max(gmax2, v);
      double diff = gmax + v;
      if (diff > 0.0) {
        double quad = k(base(i), base(i)) + k(base(t), base(t)) - 2.0 * k(base(i), base(t));
        double obj = -(diff * diff) / std::max(quad, kTau);
        if (obj <= obj_min) {
          obj_min = obj;
          j = t;
        }
      }
    }
    if (i == m || j == m || gmax + gmax2 < tol) {
      auto o = evaluate(k, y, std::span<const double>(a), c, opts.epsilon);
      if (o.gap <= opts.gap_tolerance) {
        accept(o, std::span<const double>(a));
        break;
      }
      if (finish()) break;
      exact_gradient(k, y, a, opts.epsilon, g);
      if (tol < 1e-15 * std::max(1.0, scale)) {
        throw NumericalError("SVR stalled with duality gap " + format_double(o.gap) +
                             " after " + std::to_string(iter) + " iterations");
      }
      tol *= 0.01;
      continue;
    }
    if (++iter > opts.max_iterations) {
      if (finish()) break;
      auto o = evaluate(k, y, std::span<const double>(a), c, opts.epsilon);
      throw NumericalError("SVR did not converge in " + std::to_string(opts.max_iterations) +
                           " iterations; duality gap " + format_double(o.gap));
    }

    const double old_i = a[i], old_j = a[j];
    const double quad = std::max(k(base(i), base(i)) + k(base(j), base(j)) - 2.0 * k(base(i), base(j)), kTau);
    if (sign(i) != sign(j)) {
      double delta = (-g[i] - g[j]) / quad;
      double diff = a[i] - a[j];
      a[i] += delta;
      a[j] += delta;
      if (diff > 0.0) {
        if (a[j] < 0.0) {
          a[j] = 0.0;
          a[i] = diff;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = -diff;
      }
      if (diff > 0.0) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = c - diff;
        }
      } else if (a[j] > c) {
        a[j] = c;
        a[i] = c + diff;
      }
    } else {
      double delta = (g[i] - g[j]) / quad;
      double sum = a[i] + a[j];
      a[i] -= delta;
      a[j] += delta;
      if (sum > c) {
        if (a[i] > c) {
          a[i] = c;
          a[j] = sum - c;
        }
      } else if (a[j] < 0.0) {
        a[j] = 0.0;
        a[i] = sum;
      }
      if (sum > c) {
        if (a[j] > c) {
          a[j] = c;
          a[i] = sum - c;
        }
      } else if (a[i] < 0.0) {
        a[i] = 0.0;
        a[j] = sum;
      }
    }
    const double di = a[i] - old_i, dj = a[j] - old_j;
    for (std::size_t t = 0; t < m; ++t) g[t] += q(t, i) * di + q(t, j) * dj;
  }

  out.iterations = iter;
  return out;
}

LinearFit fit_svr(const Matrix& x, std::span<const double> y, double c, const SvrOptions& opts) {
  if (x.rows() != y.size()) throw ConfigError("SVR target length does not match the rows");
  if (x.rows() < 2) throw ConfigError("SVR needs at least two rows");
  // The dual coefficients sum to zero, so centring the columns leaves them unchanged and
  // only moves the bias; it removes the common component that slows SMO down.
  const std::size_t n = x.rows(), p = x.cols();
  std::vector<double> mean(p, 0.0);
  Matrix xc = x;
  for (std::size_t col = 0; col < p; ++col) {
    for (std::size_t r = 0; r < n; ++r) mean[col] += x(r, col);
    mean[col] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) xc(r, col) -= mean[col];
  }
  auto sol = solve_svr_gram(gram_rows(xc), y, c, opts);
  LinearFit fit;
  fit.coef.assign(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t col = 0; col < p; ++col) fit.coef[col] += sol.dual[r] * xc(r, col);
  }
  double shift = 0.0;
  for (std::size_t col = 0; col < p; ++col) shift += fit.coef[col] * mean[col];
  fit.intercept = sol.bias - shift;
  fit.residual = sol.gap;
  return fit;
}

}  // namespace hivmob
