#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regaug/dataset.hpp"

namespace regaug {

/// Smallest value the shifted, standardized target may take before Box-Cox.
inline constexpr double kPositivityFloor = 1e-6;

/// Train-split statistics for one raw input column.
struct ColumnStats {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  double mean = 0.0;  // numeric only
  double std = 1.0;   // numeric only, n - 1 denominator
  bool dropped = false;  // zero-variance numeric column
  std::vector<std::string> categories;  // categorical only, sorted

  friend bool operator==(const ColumnStats&, const ColumnStats&) = default;
};

/// Everything the preprocessing chain learns from a training split.
struct PreprocessStats {
  std::vector<ColumnStats> columns;
  double target_mean = 0.0;
  double target_std = 1.0;
  double boxcox_lambda = 1.0;
  double boxcox_shift = 0.0;

  std::vector<std::string> dropped_columns() const;
  friend bool operator==(const PreprocessStats&, const PreprocessStats&) = default;
};

struct Preprocessed {
  Dataset data;
  /// Targets whose shifted value was <= 0 and got clamped to the floor.
  std::size_t clamped_targets = 0;
};

/// Box-Cox power transform of a strictly positive value.
double boxcox(double x, double lambda);

/// Profile log-likelihood of the Box-Cox model at `lambda` (values > 0).
double boxcox_log_likelihood(std::span<const double> values, double lambda);

/// Maximum-likelihood lambda on the grid -2, -1.99, ..., 2. The first grid
/// point wins ties. Values are sorted internally so row order is irrelevant.
double fit_boxcox_lambda(std::span<const double> values);

/// Fits column statistics, the target standardization, the Box-Cox shift and
/// lambda. Only ever sees the training split.
PreprocessStats fit_preprocess(const Dataset& train);

/// Replaces each categorical column by one 0/1 column per vocabulary entry.
/// Unseen or missing categories give an all-zero block.
Dataset one_hot_encode(const Dataset& ds, const PreprocessStats& stats);

/// Standardized target, before shift and Box-Cox.
std::vector<double> standardize_target(std::span<const double> y, const PreprocessStats& stats);

/// One-hot encode, standardize the original numeric columns, drop constant
/// ones, and map the target through standardize -> shift -> Box-Cox.
Preprocessed apply_preprocess(const Dataset& ds, const PreprocessStats& stats);

std::string stats_to_json(const PreprocessStats& stats);
PreprocessStats stats_from_json(std::string_view text);

}  // namespace regaug
