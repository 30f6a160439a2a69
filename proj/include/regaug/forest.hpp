#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "regaug/tree.hpp"

namespace regaug {

struct ForestParams {
  std::size_t n_trees = 100;
  int max_depth = -1;
  std::size_t min_samples_leaf = 1;
  /// Features drawn per split; unset means floor(sqrt(d)).
  std::optional<std::size_t> max_features;
  /// Worker threads for tree fitting. Output does not depend on it.
  std::size_t threads = 1;
};

std::size_t default_max_features(std::size_t d);

/// Seed of tree `t` in a forest with the given master seed.
std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t t);

/// n draws with replacement from [0, n), taken from the tree's own stream.
std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t tree_seed);

/// Bagged classification trees. Class probabilities are vote fractions: the
/// share of trees whose leaf majority is the class (leaf ties go to the lower
/// class), so with T trees every probability is a multiple of 1/T.
class ForestClassifier {
 public:
  ForestClassifier() = default;
  ForestClassifier(std::vector<DecisionTree> trees, int n_classes, std::size_t input_dim);

  std::size_t size() const { return trees_.size(); }
  int n_classes() const { return n_classes_; }
  std::size_t input_dim() const { return input_dim_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  /// Probability of class 1 for each row.
  std::vector<double> predict_proba(const Table& X) const;
  /// Vote fraction per class (rows x n_classes).
  Table predict_class_proba(const Table& X) const;

  friend bool operator==(const ForestClassifier&, const ForestClassifier&) = default;

 private:
  std::vector<DecisionTree> trees_;
  int n_classes_ = 2;
  std::size_t input_dim_ = 0;
};

ForestClassifier fit_forest_classifier(const Table& X, std::span<const int> labels,
                                       const ForestParams& params, std::uint64_t master_seed,
                                       int n_classes = 2);

/// Bagged regression trees; prediction is the mean of the tree outputs.
class ForestRegressor {
 public:
  ForestRegressor() = default;
  explicit ForestRegressor(std::vector<DecisionTree> trees);

  std::size_t size() const { return trees_.size(); }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  std::vector<double> predict(const Table& X) const;

 private:
  std::vector<DecisionTree> trees_;
};

ForestRegressor fit_forest_regressor(const Table& X, std::span<const double> y,
                                     const ForestParams& params, std::uint64_t master_seed);

}  // namespace regaug
