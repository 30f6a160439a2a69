#include "regaug/regressor.hpp"

#include <cmath>
#include <limits>

#include "regaug/metrics.hpp"

namespace regaug {

std::string to_string(RegressorKind k) {
  switch (k) {
    case RegressorKind::linear:
      return "linear";
    case RegressorKind::tree:
      return "tree";
    case RegressorKind::forest:
      return "forest";
    case RegressorKind::gbt:
      return "gbt";
  }
  return "?";
}

RegressorKind parse_regressor_kind(std::string_view s) {
  if (s == "linear") return RegressorKind::linear;
  if (s == "tree") return RegressorKind::tree;
  if (s == "forest") return RegressorKind::forest;
  if (s == "gbt") return RegressorKind::gbt;
  throw ConfigError("unknown regressor '" + std::string(s) + "' (expected linear, tree, forest or gbt)");
}

std::string Hyperparams::describe(RegressorKind kind) const {
  const std::string depth = max_depth < 0 ? "inf" : std::to_string(max_depth);
  switch (kind) {
    case RegressorKind::linear:
      return "ols";
    case RegressorKind::tree:
      return "depth=" + depth + " leaf=" + std::to_string(min_samples_leaf);
    case RegressorKind::forest:
      return "trees=" + std::to_string(n_trees) + " depth=" + depth + " leaf=" + std::to_string(min_samples_leaf);
    case RegressorKind::gbt:
      return "stages=" + std::to_string(n_trees) + " lr=" + format_double(learning_rate) + " depth=" + depth;
  }
  return {};
}

GridSearchSpec GridSearchSpec::defaults() {
  GridSearchSpec spec;
  for (int depth : {4, 6, 8, 12, -1}) {
    for (std::size_t leaf : {1u, 5u, 20u}) {
      Hyperparams h;
      h.max_depth = depth;
      h.min_samples_leaf = leaf;
      spec.tree.push_back(h);
      h.n_trees = 100;
      spec.forest.push_back(h);
    }
  }
  for (std::size_t stages : {100u, 300u}) {
    for (double lr : {0.05, 0.1, 0.3}) {
      for (int depth : {3, 6}) {
        Hyperparams h;
        h.n_trees = stages;
        h.learning_rate = lr;
        h.max_depth = depth;
        spec.gbt.push_back(h);
      }
    }
  }
  return spec;
}

const std::vector<Hyperparams>& GridSearchSpec::grid(RegressorKind kind) const {
  switch (kind) {
    case RegressorKind::tree:
      return tree;
    case RegressorKind::forest:
      return forest;
    case RegressorKind::gbt:
      return gbt;
    case RegressorKind::linear:
      break;
  }
  throw Error("linear regression has no hyperparameter grid");
}

void GridSearchSpec::validate() const {
  if (tree.empty() || forest.empty() || gbt.empty()) throw ConfigError("grid search: every grid must be nonempty");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("grid search: holdout_fraction must lie in (0, 1)");
  }
}

std::vector<double> FittedRegressor::predict(const Table& X) const {
  return std::visit([&X](const auto& m) { return m.predict(X); }, model_);
}

FittedRegressor fit_regressor(RegressorKind kind, const Table& X, std::span<const double> y,
                              const Hyperparams& params, std::uint64_t seed, std::size_t threads) {
  switch (kind) {
    case RegressorKind::linear:
      return {kind, fit_linear(X, y), params};
    case RegressorKind::tree: {
      TreeParams tp;
      tp.max_depth = params.max_depth;
      tp.min_samples_leaf = params.min_samples_leaf;
      return {kind, fit_tree(X, y, tp, TreeTask::regress, seed), params};
    }
    case RegressorKind::forest: {
      ForestParams fp;
      fp.n_trees = params.n_trees;
      fp.max_depth = params.max_depth;
      fp.min_samples_leaf = params.min_samples_leaf;
      fp.threads = threads;
      return {kind, fit_forest_regressor(X, y, fp, seed), params};
    }
    case RegressorKind::gbt: {
      GbtParams gp;
      gp.n_stages = params.n_trees;
      gp.learning_rate = params.learning_rate;
      gp.max_depth = params.max_depth;
      return {kind, fit_gbt(X, y, gp), params};
    }
  }
  throw Error("fit_regressor: unknown kind");
}

FittedRegressor grid_search_fit(const Table& X, std::span<const double> y, RegressorKind kind,
                                const GridSearchSpec& spec, std::uint64_t seed) {
  if (kind == RegressorKind::linear) throw Error("grid_search_fit: linear regression is not tuned");
  spec.validate();
  const std::size_t n = X.rows();
  const auto n_hold = static_cast<std::size_t>(std::ceil(spec.holdout_fraction * static_cast<double>(n)));
  if (n_hold < spec.min_holdout_rows || n_hold >= n) {
    throw Error("grid_search_fit: holdout of " + std::to_string(n_hold) + " rows is too small (need " +
                std::to_string(spec.min_holdout_rows) + ")");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "holdout"));
  rng.shuffle(order);
  const std::span<const std::size_t> hold_idx(order.data(), n_hold);
  const std::span<const std::size_t> fit_idx(order.data() + n_hold, n - n_hold);

  const Table X_fit = X.select_rows(fit_idx);
  const Table X_hold = X.select_rows(hold_idx);
  const auto y_fit = select(y, fit_idx);
  const auto y_hold = select(y, hold_idx);

  const auto& cells = spec.grid(kind);
  std::optional<FittedRegressor> best;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (const auto& cell : cells) {
    auto model = fit_regressor(kind, X_fit, y_fit, cell, derive_seed(seed, "model"), spec.threads);
    const double score = rmse(y_hold, model.predict(X_hold));
    if (!best || score < best_rmse) {
      best_rmse = score;
      best.emplace(std::move(model));
    }
  }
  return std::move(*best);
}

FittedRegressor fit_with_protocol(const Table& X, std::span<const double> y, RegressorKind kind,
                                  const GridSearchSpec& spec, std::uint64_t seed) {
  if (kind == RegressorKind::linear) return fit_regressor(kind, X, y, Hyperparams{}, seed);
  return grid_search_fit(X, y, kind, spec, seed);
}

}  // namespace regaug
