#pragma once

#include <span>
#include <vector>

#include "regaug/tree.hpp"

namespace regaug {

struct GbtParams {
  std::size_t n_stages = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  std::size_t min_samples_leaf = 1;
};

/// Squared-error gradient boosting: init = mean(y), each stage is a regression
/// tree fit to the current residuals and added with weight learning_rate.
struct GbtModel {
  double init = 0.0;
  double learning_rate = 0.1;
  std::vector<DecisionTree> stages;

  std::vector<double> predict(const Table& X) const;
  /// Predictions using only the first `k` stages.
  std::vector<double> predict(const Table& X, std::size_t k) const;
};

GbtModel fit_gbt(const Table& X, std::span<const double> y, const GbtParams& params);

}  // namespace regaug
