#include "regaug/cdf.hpp"

#include <algorithm>

namespace regaug {

std::vector<double> rectify(std::span<const double> probs) {
  struct Block {
    double sum;
    std::size_t count;
    double value() const { return sum / static_cast<double>(count); }
  };
  std::vector<Block> blocks;
  blocks.reserve(probs.size());
  for (double p : probs) {
    blocks.push_back({p, 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].value() > blocks.back().value()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().sum += top.sum;
      blocks.back().count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(probs.size());
  for (const auto& b : blocks) {
    // Singleton blocks keep their input bit-for-bit.
    const double v = b.count == 1 ? b.sum : b.value();
    out.insert(out.end(), b.count, std::clamp(v, 0.0, 1.0));
  }
  return out;
}

std::vector<double> bin_representatives(std::span<const double> train_targets, const ThresholdSet& ts,
                                        Representative kind) {
  if (train_targets.empty()) throw Error("bin_representatives: no training targets");
  const std::size_t s = ts.size();
  std::vector<std::vector<double>> bins(s + 1);
  for (double y : train_targets) {
    const auto it = std::lower_bound(ts.thresholds.begin(), ts.thresholds.end(), y);
    bins[static_cast<std::size_t>(it - ts.thresholds.begin())].push_back(y);
  }
  const auto [lo_it, hi_it] = std::minmax_element(train_targets.begin(), train_targets.end());
  std::vector<double> reps(s + 1);
  for (std::size_t k = 0; k <= s; ++k) {
    auto& b = bins[k];
    if (b.empty()) {
      const double lo = k == 0 ? *lo_it : std::max(*lo_it, ts.thresholds[k - 1]);
      const double hi = k == s ? *hi_it : std::min(*hi_it, ts.thresholds[k]);
      reps[k] = lo + (hi - lo) / 2.0;
      continue;
    }
    if (kind == Representative::mean) {
      reps[k] = mean(b);
      continue;
    }
    std::sort(b.begin(), b.end());
    const std::size_t m = b.size();
    reps[k] = m % 2 ? b[m / 2] : b[m / 2 - 1] + (b[m / 2] - b[m / 2 - 1]) / 2.0;
  }
  return reps;
}

double expectation_predict(std::span<const double> cdf_values, std::span<const double> representatives) {
  const std::size_t s = cdf_values.size();
  if (representatives.size() != s + 1) throw Error("expectation_predict: need S + 1 representatives");
  double prev = 0.0;
  double out = 0.0;
  for (std::size_t k = 0; k <= s; ++k) {
    const double next = k < s ? cdf_values[k] : 1.0;
    out += (next - prev) * representatives[k];
    prev = next;
  }
  return out;
}

double expectation_predict(const CdfEstimate& cdf) { return expectation_predict(cdf.values, cdf.representatives); }

CdfRegressor::CdfRegressor(const AugmentModel& model, std::span<const double> train_targets, Representative kind)
    : model_(&model), reps_(bin_representatives(train_targets, model.thresholds(), kind)) {}

CdfEstimate CdfRegressor::estimate(std::span<const double> probabilities) const {
  CdfEstimate e;
  e.grid = model_->thresholds().thresholds;
  e.values = rectify(probabilities);
  e.representatives = reps_;
  return e;
}

std::vector<double> CdfRegressor::predict(const Table& X) const {
  const Table probs = model_->probabilities(X);
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) {
    out[r] = expectation_predict(rectify(probs.row(r)), reps_);
  }
  return out;
}

std::vector<double> cdf_regressor(const AugmentModel& model, std::span<const double> train_targets,
                                  const Table& X_test, Representative kind) {
  return CdfRegressor(model, train_targets, kind).predict(X_test);
}

}  // namespace regaug
