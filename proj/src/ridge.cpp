#include "hivmob/ridge.hpp"

#include <cmath>

#include "hivmob/errors.hpp"
#include "hivmob/linalg.hpp"

namespace hivmob {

LinearFit fit_ridge(const Matrix& x, std::span<const double> y, double lambda) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n < 2) throw ConfigError("ridge needs at least two rows");
  if (y.size() != n) throw ConfigError("ridge target length does not match the rows");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("ridge lambda must be finite and >= 0");

  std::vector<double> mx(p, 0.0);
  double my = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    my += y[r];
    for (std::size_t c = 0; c < p; ++c) mx[c] += x(r, c);
  }
  my /= static_cast<double>(n);
  for (double& v : mx) v /= static_cast<double>(n);
  Matrix xc(n, p);
  std::vector<double> yc(n);
  for (std::size_t r = 0; r < n; ++r) {
    yc[r] = y[r] - my;
    for (std::size_t c = 0; c < p; ++c) xc(r, c) = x(r, c) - mx[c];
  }

  LinearFit fit;
  if (p == 0) {
    fit.intercept = my;
    return fit;
  }
  // Normal equations in whichever of the p x p or n x n forms is smaller.
  std::vector<double> beta(p, 0.0);
  if (p <= n || lambda == 0.0) {
    Matrix a = gram_cols(xc);
    for (std::size_t i = 0; i < p; ++i) a(i, i) += lambda;
    std::vector<double> rhs(p, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < p; ++c) rhs[c] += xc(r, c) * yc[r];
    }
    try {
      beta = solve_spd(a, rhs);
    } catch (const NumericalError&) {
      if (lambda == 0.0) {
        throw NumericalError("least squares system is singular (collinear features); use lambda > 0");
      }
      throw;
    }
  } else {
    Matrix a = gram_rows(xc);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += lambda;
    auto alpha = solve_spd(a, yc);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < p; ++c) beta[c] += xc(r, c) * alpha[r];
    }
  }

  // Relative residual of (Xc^T Xc + lambda I) beta = Xc^T yc.
  std::vector<double> xb(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) xb[r] += xc(r, c) * beta[c];
  }
  double num = 0.0, den = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    double lhs = lambda * beta[c], rhs = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      lhs += xc(r, c) * xb[r];
      rhs += xc(r, c) * yc[r];
    }
    num += (lhs - rhs) * (lhs - rhs);
    den += rhs * rhs;
  }
  fit.residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  fit.intercept = my;
  for (std::size_t c = 0; c < p; ++c) fit.intercept -= mx[c] * beta[c];
  fit.coef = std::move(beta);
  return fit;
}

}  // namespace hivmob
