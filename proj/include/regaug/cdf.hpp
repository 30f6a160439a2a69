#pragma once

#include <span>
#include <vector>

#include "regaug/augment.hpp"

namespace regaug {

enum class Representative { median, mean };

/// Pool-adjacent-violators: least-squares projection onto non-decreasing
/// sequences (equal weights). Idempotent.
std::vector<double> rectify(std::span<const double> probs);

/// Representative target of each of the S + 1 intervals cut by `ts`:
/// (-inf, y_1], (y_1, y_2], ..., (y_S, +inf), with the outer bounds clipped to
/// the observed training range. An empty interval falls back to the midpoint
/// of its clipped bounds.
std::vector<double> bin_representatives(std::span<const double> train_targets, const ThresholdSet& ts,
                                        Representative kind = Representative::median);

/// A conditional CDF evaluated at the thresholds, plus interval representatives.
struct CdfEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> representatives;
};

/// sum_k (F_{k+1} - F_k) rep_k over k = 0..S with F_0 = 0 and F_{S+1} = 1.
double expectation_predict(const CdfEstimate& cdf);
double expectation_predict(std::span<const double> cdf_values, std::span<const double> representatives);

/// Regressor-free predictor: X -> threshold probabilities -> rectify ->
/// expectation over interval representatives.
class CdfRegressor {
 public:
  CdfRegressor(const AugmentModel& model, std::span<const double> train_targets,
               Representative kind = Representative::median);

  const std::vector<double>& representatives() const { return reps_; }
  CdfEstimate estimate(std::span<const double> probabilities) const;
  std::vector<double> predict(const Table& X) const;

 private:
  const AugmentModel* model_;
  std::vector<double> reps_;
};

std::vector<double> cdf_regressor(const AugmentModel& model, std::span<const double> train_targets,
                                  const Table& X_test, Representative kind = Representative::median);

}  // namespace regaug
