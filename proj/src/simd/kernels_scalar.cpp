#include <cmath>

#include "hivmob/simd.hpp"

namespace hivmob::simd {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void sq_dist_scalar(double px, double py, const double* xs, const double* ys, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double dx = xs[i] - px;
    double dy = ys[i] - py;
    out[i] = dx * dx + dy * dy;
  }
}

GaussianSums gaussian_sums_scalar(double px, double py, const GaussianSources& s) {
  GaussianSums acc;
  for (std::size_t i = 0; i < s.n; ++i) {
    double dx = s.x[i] - px;
    double dy = s.y[i] - py;
    double d2 = dx * dx + dy * dy;
    if (d2 > s.cutoff2[i]) continue;
    double w = s.norm[i] * std::exp(-0.5 * (d2 * s.inv_h2[i]));
    acc.kernel += w;
    acc.positive += w * s.positive[i];
    acc.tested += w * s.tested[i];
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", dot_scalar, axpy_scalar, sq_dist_scalar, gaussian_sums_scalar};
  return table;
}

}  // namespace hivmob::simd
