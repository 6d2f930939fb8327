#include "hivmob/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "hivmob/errors.hpp"

namespace hivmob {

bool cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, i)));
  const double floor = scale * 1e-14;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > floor)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / ljj;
    }
    for (std::size_t i = 0; i < j; ++i) a(i, j) = 0.0;
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
  const std::size_t n = l.rows();
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

std::vector<double> solve_spd(const Matrix& a, std::span<const double> b) {
  Matrix l = a;
  if (!cholesky(l)) throw NumericalError("matrix is not numerically positive definite");
  auto x = cholesky_solve(l, b);
  const std::size_t n = a.rows();
  std::vector<double> r(n);
  for (int step = 0; step < 2; ++step) {
    for (std::size_t i = 0; i < n; ++i) {
      long double s = b[i];
      for (std::size_t k = 0; k < n; ++k) s -= static_cast<long double>(a(i, k)) * x[k];
      r[i] = static_cast<double>(s);
    }
    auto dx = cholesky_solve(l, r);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
  }
  return x;
}

Matrix gram_cols(const Matrix& a) {
  const std::size_t p = a.cols();
  Matrix g(p, p);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto row = a.row(r);
    for (std::size_t i = 0; i < p; ++i) {
      for (std::size_t j = 0; j <= i; ++j) g(i, j) += row[i] * row[j];
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < i; ++j) g(j, i) = g(i, j);
  }
  return g;
}

Matrix gram_rows(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      auto ri = a.row(i);
      auto rj = a.row(j);
      for (std::size_t k = 0; k < a.cols(); ++k) s += ri[k] * rj[k];
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  return g;
}

namespace {

// Unconstrained least squares on the passive columns via normal equations.
std::vector<double> passive_solve(const Matrix& ata, std::span<const double> atb, const std::vector<bool>& passive) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < passive.size(); ++i) {
    if (passive[i]) idx.push_back(i);
  }
  Matrix sub(idx.size(), idx.size());
  std::vector<double> rhs(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    rhs[i] = atb[idx[i]];
    for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = ata(idx[i], idx[j]);
  }
  std::vector<double> z(passive.size(), 0.0);
  Matrix l = sub;
  if (!cholesky(l)) return {};
  auto s = cholesky_solve(l, rhs);
  for (std::size_t i = 0; i < idx.size(); ++i) z[idx[i]] = s[i];
  return z;
}

}  // namespace

NnlsResult nnls(const Matrix& a, std::span<const double> b) {
  const std::size_t n = a.cols();
  const Matrix ata = gram_cols(a);
  std::vector<double> atb(n, 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) atb[c] += a(r, c) * b[r];
  }
  double scale = 0.0;
  for (double v : atb) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-12 * std::max(scale, 1.0);

  NnlsResult res;
  res.x.assign(n, 0.0);
  std::vector<bool> passive(n, false);
  std::vector<bool> excluded(n, false);  // columns collinear with the passive set
  auto& x = res.x;
  const std::size_t max_iter = 30 * std::max<std::size_t>(n, 1);
  while (res.iterations < max_iter) {
    // Negative gradient w = A^T (b - A x).
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = atb[i];
      for (std::size_t j = 0; j < n; ++j) s -= ata(i, j) * x[j];
      w[i] = s;
    }
    std::size_t t = n;
    double best = tol;
    for (std::size_t i = 0; i < n; ++i) {
      if (!passive[i] && !excluded[i] && w[i] > best) {
        best = w[i];
        t = i;
      }
    }
    if (t == n) break;
    passive[t] = true;
    for (;;) {
      ++res.iterations;
      auto z = passive_solve(ata, atb, passive);
      if (z.empty()) {
        // Collinear with the passive set: this column cannot help.
        passive[t] = false;
        excluded[t] = true;
        break;
      }
      bool feasible = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (passive[i] && z[i] <= 0.0) feasible = false;
      }
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      std::size_t blocking = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!passive[i] || z[i] > 0.0) continue;
        double step = x[i] / (x[i] - z[i]);
        if (blocking == n || step < alpha) {
          alpha = step;
          blocking = i;
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * (z[i] - x[i]);
        if (passive[i] && (i == blocking || x[i] <= 0.0)) {
          passive[i] = false;
          x[i] = 0.0;
        }
      }
      if (res.iterations >= max_iter) break;
    }
  }
  double rr = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double s = b[r];
    for (std::size_t c = 0; c < n; ++c) s -= a(r, c) * x[c];
    rr += s * s;
  }
  res.residual_norm = std::sqrt(rr);
  return res;
}

}  // namespace hivmob
