#pragma once

#include <span>
#include <vector>

#include "hivmob/matrix.hpp"

namespace hivmob {

/// In-place lower Cholesky factor of a symmetric positive definite matrix.
/// Returns false when a pivot is not positive (relative to the diagonal scale).
bool cholesky(Matrix& a);

/// Solves L L^T x = b given the factor from cholesky().
std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b);

/// Solves A x = b for SPD A with one step of iterative refinement.
/// Throws NumericalError when A is not numerically positive definite.
std::vector<double> solve_spd(const Matrix& a, std::span<const double> b);

/// A^T A (cols x cols) and A A^T (rows x rows).
Matrix gram_cols(const Matrix& a);
Matrix gram_rows(const Matrix& a);

struct NnlsResult {
  std::vector<double> x;
  double residual_norm = 0.0;
  std::size_t iterations = 0;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
NnlsResult nnls(const Matrix& a, std::span<const double> b);

}  // namespace hivmob
