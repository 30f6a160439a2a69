#include "regaug/gbt.hpp"

namespace regaug {

std::vector<double> GbtModel::predict(const Table& X) const { return predict(X, stages.size()); }

std::vector<double> GbtModel::predict(const Table& X, std::size_t k) const {
  std::vector<double> out(X.rows(), init);
  k = std::min(k, stages.size());
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t r = 0; r < X.rows(); ++r) out[r] += learning_rate * stages[s].predict(X.row(r));
  }
  return out;
}

GbtModel fit_gbt(const Table& X, std::span<const double> y, const GbtParams& params) {
  if (X.rows() == 0) throw Error("fit_gbt: empty training table");
  if (X.rows() != y.size()) throw Error("fit_gbt: X and y row counts differ");
  GbtModel model;
  model.init = mean(y);
  model.learning_rate = params.learning_rate;
  TreeParams tp;
  tp.max_depth = params.max_depth;
  tp.min_samples_leaf = params.min_samples_leaf;

  std::vector<double> fitted(y.size(), model.init);
  std::vector<double> residual(y.size());
  model.stages.reserve(params.n_stages);
  for (std::size_t s = 0; s < params.n_stages; ++s) {
    for (std::size_t r = 0; r < y.size(); ++r) residual[r] = y[r] - fitted[r];
    // No feature subsampling, so the seed is never drawn from.
    auto tree = fit_tree(X, residual, tp, TreeTask::regress, 0);
    for (std::size_t r = 0; r < y.size(); ++r) fitted[r] += params.learning_rate * tree.predict(X.row(r));
    model.stages.push_back(std::move(tree));
  }
  return model;
}

}  // namespace regaug
