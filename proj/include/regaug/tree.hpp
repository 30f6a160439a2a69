#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "regaug/common.hpp"

namespace regaug {

enum class TreeTask { classify, regress };

struct TreeParams {
  /// Negative means unlimited.
  int max_depth = -1;
  std::size_t min_samples_leaf = 1;
  /// Features drawn per node; 0 means all of them, in column order.
  std::size_t max_features = 0;
  /// Classification only.
  int n_classes = 2;
};

/// Flat CART node. Internal nodes route `x[feature] <= threshold` to `left`.
struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t counts_at = 0;  // classification leaves: offset into class counts
  double threshold = 0.0;
  /// Leaf output: mean target (regression) or majority class (classification).
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  DecisionTree(TreeTask task, int n_classes, std::size_t input_dim, std::vector<TreeNode> nodes,
               std::vector<std::uint32_t> class_counts);

  TreeTask task() const { return task_; }
  int n_classes() const { return n_classes_; }
  std::size_t input_dim() const { return input_dim_; }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& class_counts() const { return counts_; }

  std::size_t leaf_index(std::span<const double> x) const;
  /// Regression mean or majority class of the routed leaf.
  double predict(std::span<const double> x) const { return nodes_[leaf_index(x)].value; }
  std::vector<double> predict(const Table& X) const;
  /// Class counts stored in a classification leaf.
  std::span<const std::uint32_t> leaf_counts(std::size_t node) const;
  std::size_t depth() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  TreeTask task_ = TreeTask::regress;
  int n_classes_ = 0;
  std::size_t input_dim_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<std::uint32_t> counts_;
};

/// Greedy CART. Classification minimizes weighted Gini impurity, regression
/// minimizes weighted variance. Candidate thresholds are midpoints between
/// consecutive distinct values of a feature. `sample` selects the training
/// rows (duplicates allowed, as in a bootstrap); empty means all rows. For
/// classification, `y` holds class indices in [0, n_classes).
DecisionTree fit_tree(const Table& X, std::span<const double> y, const TreeParams& params,
                      TreeTask task, std::uint64_t seed, std::span<const std::size_t> sample = {});

/// Best split of one feature over the given rows, as found by the sweep used
/// in fit_tree. Exposed for testing against a brute-force enumerator.
struct SplitCandidate {
  bool valid = false;
  double threshold = 0.0;
  /// Weighted impurity: sum over children of n_child * impurity(child).
  double weighted_impurity = 0.0;
};
SplitCandidate best_split(const Table& X, std::span<const double> y, std::span<const std::size_t> rows,
                          std::size_t feature, TreeTask task, int n_classes,
                          std::size_t min_samples_leaf);

}  // namespace regaug
