#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace hivmob::simd {

/// Structure-of-arrays view of Gaussian kernel sources (survey clusters).
/// For source i the weight at squared distance d2 is
///   norm[i] * exp(-0.5 * d2 * inv_h2[i])   if d2 <= cutoff2[i], else 0.
struct GaussianSources {
  const double* x = nullptr;
  const double* y = nullptr;
  const double* inv_h2 = nullptr;
  const double* norm = nullptr;
  const double* cutoff2 = nullptr;
  const double* positive = nullptr;
  const double* tested = nullptr;
  std::size_t n = 0;
};

struct GaussianSums {
  double kernel = 0.0;    // sum of weights
  double positive = 0.0;  // sum of weight * positive
  double tested = 0.0;    // sum of weight * tested
};

/// One implementation of every data-parallel inner loop. The scalar table is
/// the reference; vector tables must agree with it to rounding.
struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[i] = (xs[i]-px)^2 + (ys[i]-py)^2, bit-identical across tables.
  void (*sq_dist)(double px, double py, const double* xs, const double* ys, double* out, std::size_t n);
  GaussianSums (*gaussian_sums)(double px, double py, const GaussianSources& src);
};

const KernelTable& scalar_table();
/// nullptr when not compiled in or when the CPU lacks AVX2+FMA.
const KernelTable* avx2_table();

/// Table used by the library. Chosen once from the CPU, overridable with the
/// HIVMOB_SIMD environment variable ("scalar", "avx2", "auto") or force().
const KernelTable& active();
/// Returns false when the requested ISA is unavailable (selection unchanged).
bool force(std::string_view isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace hivmob::simd
