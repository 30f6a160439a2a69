#include "regaug/linear.hpp"

#include <Eigen/Dense>

namespace regaug {

double LinearModel::predict(std::span<const double> x) const {
  double v = intercept;
  for (std::size_t j = 0; j < coef.size(); ++j) v += coef[j] * x[j];
  return v;
}

std::vector<double> LinearModel::predict(const Table& X) const {
  if (X.cols() != coef.size()) throw Error("LinearModel::predict: dimension mismatch");
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

LinearModel fit_linear(const Table& X, std::span<const double> y) {
  const auto n = X.rows();
  const auto d = X.cols();
  if (n == 0) throw Error("fit_linear: empty training table");
  if (y.size() != n) throw Error("fit_linear: X and y row counts differ");

  Eigen::VectorXd x_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) x_mean[static_cast<Eigen::Index>(c)] += X(r, c);
  }
  x_mean /= static_cast<double>(n);
  const double y_mean = mean(y);

  LinearModel model;
  model.coef.assign(d, 0.0);
  if (d > 0) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const auto er = static_cast<Eigen::Index>(r);
      for (std::size_t c = 0; c < d; ++c) {
        A(er, static_cast<Eigen::Index>(c)) = X(r, c) - x_mean[static_cast<Eigen::Index>(c)];
      }
      b[er] = y[r] - y_mean;
    }
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    const Eigen::VectorXd beta = cod.solve(b);
    for (std::size_t c = 0; c < d; ++c) model.coef[c] = beta[static_cast<Eigen::Index>(c)];
  }
  model.intercept = y_mean;
  for (std::size_t c = 0; c < d; ++c) model.intercept -= model.coef[c] * x_mean[static_cast<Eigen::Index>(c)];
  return model;
}

}  // namespace regaug
