#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "regaug/metrics.hpp"
#include "regaug/regressor.hpp"
#include "regaug/stats.hpp"

namespace regaug {

/// Assignment of n rows to k folds: seeded shuffle, then contiguous chunks.
/// The first n % k folds hold one extra row.
struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> test_indices(std::size_t fold) const;
  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> sizes() const;
};

FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

enum class Arm { native, augmented };
std::string to_string(Arm a);
Arm parse_arm(std::string_view s);

struct CellKey {
  std::string dataset;
  RegressorKind regressor = RegressorKind::linear;
  Arm arm = Arm::native;
  std::size_t s = 0;
  std::size_t fold = 0;

  auto operator<=>(const CellKey&) const = default;
};

struct CellValue {
  double rmse_train = 0.0;
  double rmse_test = 0.0;
};

/// Raw per-fold RMSE cells keyed by (dataset, regressor, arm, S, fold).
class ExperimentReport {
 public:
  void add(const CellKey& key, const CellValue& value);
  bool contains(const CellKey& key) const { return cells_.contains(key); }
  const CellValue& at(const CellKey& key) const;
  std::size_t size() const { return cells_.size(); }
  const std::map<CellKey, CellValue>& cells() const { return cells_; }

  /// Test RMSE of folds 0..folds-1, throwing on the first missing cell.
  std::vector<double> test_rmses(const std::string& dataset, RegressorKind reg, Arm arm, std::size_t s,
                                 std::size_t folds) const;
  std::vector<double> train_rmses(const std::string& dataset, RegressorKind reg, Arm arm, std::size_t s,
                                  std::size_t folds) const;

  /// CSV with columns dataset,regressor,arm,S,fold,rmse_train,rmse_test in key order.
  std::string to_csv() const;
  static ExperimentReport from_csv(std::string_view text);

 private:
  std::map<CellKey, CellValue> cells_;
};

enum class Verdict { loss, tie, win };
std::string to_string(Verdict v);

struct ArmComparison {
  std::string dataset;
  double native_mean = 0.0;
  double augmented_mean = 0.0;
  PairedTTest test;
  Verdict verdict = Verdict::tie;
};

/// Paired t-test of augmented vs native over the fold test RMSEs of one dataset.
ArmComparison compare_arms(const ExperimentReport& report, const std::string& dataset, RegressorKind reg,
                           std::size_t s, std::size_t folds);

struct WinTieLoss {
  std::size_t losses = 0;
  std::size_t ties = 0;
  std::size_t wins = 0;
  friend bool operator==(const WinTieLoss&, const WinTieLoss&) = default;
};

/// Augmented vs native verdicts over datasets: significant and lower mean is a
/// win, significant and higher is a loss, anything else a tie.
WinTieLoss win_tie_loss(const ExperimentReport& report, const std::vector<std::string>& datasets,
                        RegressorKind reg, std::size_t s, std::size_t folds);

}  // namespace regaug
