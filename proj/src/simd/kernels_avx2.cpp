// AVX2 + FMA kernels. Only reached through the dispatch table after a CPU check.

#include <immintrin.h>

#include <cmath>

#include "tables.hpp"

namespace hivmob::simd::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

// exp(x) for x in [-708, 0]: x = k ln2 + r with |r| <= ln2/2, degree-13 Taylor
// polynomial in r (truncation < 1e-17 relative), then scale by 2^k through the
// exponent bits.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d lo_clamp = _mm256_set1_pd(-708.0);
  x = _mm256_max_pd(x, lo_clamp);
  __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double c[14] = {1.0,
                                   1.0,
                                   1.0 / 2,
                                   1.0 / 6,
                                   1.0 / 24,
                                   1.0 / 120,
                                   1.0 / 720,
                                   1.0 / 5040,
                                   1.0 / 40320,
                                   1.0 / 362880,
                                   1.0 / 3628800,
                                   1.0 / 39916800,
                                   1.0 / 479001600,
                                   1.0 / 6227020800};
  __m256d p = _mm256_set1_pd(c[13]);
  for (int i = 12; i >= 0; --i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  // 2^k: k + 2^52 + 2^51 puts k in the low mantissa bits.
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, magic)), _mm256_castpd_si256(magic));
  __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4) s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  double s = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void sq_dist_avx2(double px, double py, const double* xs, const double* ys, double* out, std::size_t n) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vy);
    // Separate mul/add (no FMA) so results match the scalar table bit for bit.
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
  }
  for (; i < n; ++i) {
    double dx = xs[i] - px;
    double dy = ys[i] - py;
    out[i] = dx * dx + dy * dy;
  }
}

GaussianSums gaussian_sums_avx2(double px, double py, const GaussianSources& s) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  const __m256d neg_half = _mm256_set1_pd(-0.5);
  __m256d acc_k = _mm256_setzero_pd();
  __m256d acc_p = _mm256_setzero_pd();
  __m256d acc_t = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= s.n; i += 4) {
    __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(s.x + i), vx);
    __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(s.y + i), vy);
    __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    __m256d inside = _mm256_cmp_pd(d2, _mm256_loadu_pd(s.cutoff2 + i), _CMP_LE_OQ);
    if (_mm256_movemask_pd(inside) == 0) continue;
    __m256d arg = _mm256_mul_pd(neg_half, _mm256_mul_pd(d2, _mm256_loadu_pd(s.inv_h2 + i)));
    __m256d w = _mm256_mul_pd(_mm256_loadu_pd(s.norm + i), exp_nonpositive(arg));
    w = _mm256_and_pd(w, inside);
    acc_k = _mm256_add_pd(acc_k, w);
    acc_p = _mm256_fmadd_pd(w, _mm256_loadu_pd(s.positive + i), acc_p);
    acc_t = _mm256_fmadd_pd(w, _mm256_loadu_pd(s.tested + i), acc_t);
  }
  GaussianSums out{hsum(acc_k), hsum(acc_p), hsum(acc_t)};
  for (; i < s.n; ++i) {
    double dx = s.x[i] - px;
    double dy = s.y[i] - py;
    double d2 = dx * dx + dy * dy;
    if (d2 > s.cutoff2[i]) continue;
    double w = s.norm[i] * std::exp(-0.5 * (d2 * s.inv_h2[i]));
    out.kernel += w;
    out.positive += w * s.positive[i];
    out.tested += w * s.tested[i];
  }
  return out;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2", dot_avx2, axpy_avx2, sq_dist_avx2, gaussian_sums_avx2};
  return table;
}

}  // namespace hivmob::simd::detail
