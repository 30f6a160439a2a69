#pragma once

#include <span>

namespace regaug {

/// sqrt(mean((y - yhat)^2)). Throws on length mismatch or empty input.
double rmse(std::span<const double> y, std::span<const double> yhat);

}  // namespace regaug
