#pragma once

#include <span>
#include <vector>

namespace hivmob {

/// Linear predictor on the columns it was fitted on.
struct LinearFit {
  std::vector<double> coef;
  double intercept = 0.0;
  double residual = 0.0;  // ridge: relative normal-equation residual; svr: certified duality gap

  double predict(std::span<const double> x) const {
    double s = intercept;
    for (std::size_t i = 0; i < coef.size(); ++i) s += coef[i] * x[i];
    return s;
  }
};

}  // namespace hivmob
