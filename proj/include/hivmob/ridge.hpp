#pragma once

#include <span>

#include "hivmob/matrix.hpp"
#include "hivmob/model.hpp"

namespace hivmob {

/// Minimises ||y - b - X beta||^2 + lambda ||beta||^2 with an unpenalised intercept.
/// lambda = 0 is ordinary least squares and throws NumericalError when the
/// centred design is rank deficient.
LinearFit fit_ridge(const Matrix& x, std::span<const double> y, double lambda);

}  // namespace hivmob
