#pragma once

#include <span>
#include <vector>

#include "regaug/common.hpp"

namespace regaug {

/// Ordinary least squares with an unpenalized intercept.
struct LinearModel {
  std::vector<double> coef;
  double intercept = 0.0;

  double predict(std::span<const double> x) const;
  std::vector<double> predict(const Table& X) const;
};

/// Solves the centered least-squares problem with a complete orthogonal
/// decomposition; rank-deficient designs get the minimum-norm coefficients.
LinearModel fit_linear(const Table& X, std::span<const double> y);

}  // namespace regaug
