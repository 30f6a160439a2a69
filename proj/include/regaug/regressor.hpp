#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "regaug/forest.hpp"
#include "regaug/gbt.hpp"
#include "regaug/linear.hpp"
#include "regaug/tree.hpp"

namespace regaug {

enum class RegressorKind { linear, tree, forest, gbt };

std::string to_string(RegressorKind k);
RegressorKind parse_regressor_kind(std::string_view s);

/// One grid cell. Fields that a kind does not use are ignored.
struct Hyperparams {
  int max_depth = -1;  // negative: unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t n_trees = 100;  // forest trees or boosting stages
  double learning_rate = 0.1;

  std::string describe(RegressorKind kind) const;
  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Hyperparameter grids searched on a 30% holdout of each training split.
struct GridSearchSpec {
  std::vector<Hyperparams> tree;
  std::vector<Hyperparams> forest;
  std::vector<Hyperparams> gbt;
  double holdout_fraction = 0.30;
  std::size_t min_holdout_rows = 10;
  std::size_t threads = 1;

  /// tree:   max_depth {4,6,8,12,unlimited} x min_samples_leaf {1,5,20}
  /// forest: the tree grid with 100 trees
  /// gbt:    stages {100,300} x learning_rate {0.05,0.1,0.3} x max_depth {3,6}
  static GridSearchSpec defaults();
  const std::vector<Hyperparams>& grid(RegressorKind kind) const;
  void validate() const;
};

class FittedRegressor {
 public:
  using Model = std::variant<LinearModel, DecisionTree, ForestRegressor, GbtModel>;

  FittedRegressor(RegressorKind kind, Model model, Hyperparams params)
      : kind_(kind), model_(std::move(model)), params_(params) {}

  RegressorKind kind() const { return kind_; }
  const Hyperparams& params() const { return params_; }
  const Model& model() const { return model_; }
  std::vector<double> predict(const Table& X) const;

 private:
  RegressorKind kind_;
  Model model_;
  Hyperparams params_;
};

/// Fits one regressor with fixed hyperparameters.
FittedRegressor fit_regressor(RegressorKind kind, const Table& X, std::span<const double> y,
                              const Hyperparams& params, std::uint64_t seed, std::size_t threads = 1);

/// Seeded 70/30 split, every grid cell scored by RMSE on the 30% holdout, and
/// the best cell's model (trained on the 70% part) returned. The first listed
/// cell wins ties. Linear regression has nothing to tune; use fit_with_protocol.
FittedRegressor grid_search_fit(const Table& X, std::span<const double> y, RegressorKind kind,
                                const GridSearchSpec& spec, std::uint64_t seed);

/// Linear: plain fit on the whole split. Others: grid_search_fit.
FittedRegressor fit_with_protocol(const Table& X, std::span<const double> y, RegressorKind kind,
                                  const GridSearchSpec& spec, std::uint64_t seed);

}  // namespace regaug
