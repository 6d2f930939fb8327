#pragma once

#include <span>
#include <vector>

#include "hivmob/matrix.hpp"
#include "hivmob/model.hpp"

namespace hivmob {

struct SvrOptions {
  double epsilon = 0.1;
  double gap_tolerance = 1e-6;      // certified duality gap P - D
  std::size_t max_iterations = 5'000'000;
  // Optional starting dual (alpha - alpha*): zero sum, entries in [-C, C]. Empty = cold start.
  std::span<const double> start{};
};

/// Solution in kernel form: f(x_i) = sum_k dual[k] K(i,k) + bias.
struct SvrDual {
  std::vector<double> dual;  // alpha - alpha*
  double bias = 0.0;
  double primal = 0.0;
  double gap = 0.0;
  std::size_t iterations = 0;
};

/// Linear epsilon-SVR on a precomputed Gram matrix (K = X X^T):
///   min 1/2 ||beta||^2 + C sum max(0, |y_i - beta.x_i - b| - epsilon).
/// The bias is the midpoint of the interval of optimal b for the final beta.
/// Throws NumericalError when the gap cannot be certified within the iteration cap.
SvrDual solve_svr_gram(const Matrix& gram, std::span<const double> y, double c, const SvrOptions& opts = {});

/// Primal coefficients from the dual; residual holds the certified gap.
LinearFit fit_svr(const Matrix& x, std::span<const double> y, double c, const SvrOptions& opts = {});

/// Midpoint of the minimisers of sum max(0, |r_i - b| - epsilon).
double optimal_bias(std::span<const double> residuals, double epsilon);

}  // namespace hivmob
