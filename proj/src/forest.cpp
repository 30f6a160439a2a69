#include "regaug/forest.hpp"

#include <cmath>

namespace regaug {

std::size_t default_max_features(std::size_t d) {
  auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))));
  while ((k + 1) * (k + 1) <= d) ++k;
  while (k * k > d) --k;
  return std::max<std::size_t>(1, k);
}

std::uint64_t tree_seed(std::uint64_t master_seed, std::size_t t) { return derive_seed(master_seed, t); }

std::vector<std::size_t> bootstrap_indices(std::size_t n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "bootstrap"));
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = rng.index(n);
  return idx;
}

namespace {

template <typename Label>
std::vector<DecisionTree> fit_bagged_trees(const Table& X, std::span<const Label> y, const ForestParams& p,
                                           std::uint64_t master_seed, TreeTask task, int n_classes) {
  if (X.rows() != y.size()) throw Error("forest: X and labels row counts differ");
  if (X.rows() == 0) throw Error("forest: empty training table");
  if (p.n_trees == 0) throw Error("forest: need at least one tree");
  std::vector<double> target(y.begin(), y.end());
  TreeParams tp;
  tp.max_depth = p.max_depth;
  tp.min_samples_leaf = p.min_samples_leaf;
  tp.max_features = p.max_features.value_or(default_max_features(X.cols()));
  tp.n_classes = n_classes;
  std::vector<DecisionTree> trees(p.n_trees);
  parallel_for(p.n_trees, p.threads, [&](std::size_t t) {
    const auto seed = tree_seed(master_seed, t);
    const auto sample = bootstrap_indices(X.rows(), seed);
    trees[t] = fit_tree(X, target, tp, task, seed, sample);
  });
  return trees;
}

}  // namespace

ForestClassifier::ForestClassifier(std::vector<DecisionTree> trees, int n_classes, std::size_t input_dim)
    : trees_(std::move(trees)), n_classes_(n_classes), input_dim_(input_dim) {
  if (trees_.empty()) throw Error("ForestClassifier: no trees");
  for (const auto& t : trees_) {
    if (t.task() != TreeTask::classify || t.n_classes() != n_classes_ || t.input_dim() != input_dim_) {
      throw Error("ForestClassifier: inconsistent tree");
    }
  }
}

Table ForestClassifier::predict_class_proba(const Table& X) const {
  if (X.cols() != input_dim_) {
    throw Error("predict_proba: expected " + std::to_string(input_dim_) + " columns, got " +
                std::to_string(X.cols()));
  }
  const auto k = static_cast<std::size_t>(n_classes_);
  std::vector<std::uint32_t> votes(X.rows() * k, 0);
  for (const auto& tree : trees_) {
    for (std::size_t r = 0; r < X.rows(); ++r) {
      votes[r * k + static_cast<std::size_t>(tree.predict(X.row(r)))] += 1;
    }
  }
  Table out(X.rows(), k);
  const auto total = static_cast<double>(trees_.size());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (std::size_t c = 0; c < k; ++c) out(r, c) = static_cast<double>(votes[r * k + c]) / total;
  }
  return out;
}

std::vector<double> ForestClassifier::predict_proba(const Table& X) const {
  if (X.cols() != input_dim_) {
    throw Error("predict_proba: expected " + std::to_string(input_dim_) + " columns, got " +
                std::to_string(X.cols()));
  }
  std::vector<std::uint32_t> votes(X.rows(), 0);
  for (const auto& tree : trees_) {
    for (std::size_t r = 0; r < X.rows(); ++r) votes[r] += tree.predict(X.row(r)) == 1.0 ? 1 : 0;
  }
  std::vector<double> out(X.rows());
  const auto total = static_cast<double>(trees_.size());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = static_cast<double>(votes[r]) / total;
  return out;
}

ForestClassifier fit_forest_classifier(const Table& X, std::span<const int> labels, const ForestParams& params,
                                       std::uint64_t master_seed, int n_classes) {
  for (int l : labels) {
    if (l < 0 || l >= n_classes) throw Error("fit_forest_classifier: label out of range");
  }
  auto trees = fit_bagged_trees(X, labels, params, master_seed, TreeTask::classify, n_classes);
  return ForestClassifier(std::move(trees), n_classes, X.cols());
}

ForestRegressor::ForestRegressor(std::vector<DecisionTree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) throw Error("ForestRegressor: no trees");
}

std::vector<double> ForestRegressor::predict(const Table& X) const {
  std::vector<double> sum(X.rows(), 0.0);
  for (const auto& tree : trees_) {
    const auto p = tree.predict(X);
    for (std::size_t r = 0; r < X.rows(); ++r) sum[r] += p[r];
  }
  for (auto& v : sum) v /= static_cast<double>(trees_.size());
  return sum;
}

ForestRegressor fit_forest_regressor(const Table& X, std::span<const double> y, const ForestParams& params,
                                     std::uint64_t master_seed) {
  return ForestRegressor(fit_bagged_trees(X, y, params, master_seed, TreeTask::regress, 0));
}

}  // namespace regaug
