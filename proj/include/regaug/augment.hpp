#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "regaug/dataset.hpp"
#include "regaug/discretize.hpp"
#include "regaug/forest.hpp"
#include "regaug/regressor.hpp"

namespace regaug {

struct AugmentOptions {
  std::size_t s = 32;
  Discretization method = Discretization::equal_frequency;
  ClassEncoding encoding = ClassEncoding::binary_per_threshold;
  std::size_t n_trees = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// S threshold classifiers fitted on a training split. transform() appends
/// one column per threshold holding the predicted P(y <= y_i | x).
///
/// With the default binary encoding there is one forest per threshold, trained
/// on 1{y <= y_i}. The multiclass encoding trains a single forest on interval
/// indices and accumulates its class vote fractions into the same S columns.
class AugmentModel {
 public:
  AugmentModel() = default;
  AugmentModel(ThresholdSet thresholds, ClassEncoding encoding, std::vector<ForestClassifier> classifiers,
               std::size_t input_dim);

  const ThresholdSet& thresholds() const { return thresholds_; }
  ClassEncoding encoding() const { return encoding_; }
  const std::vector<ForestClassifier>& classifiers() const { return classifiers_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t s() const { return thresholds_.size(); }
  std::size_t output_dim() const { return input_dim_ + s(); }

  /// n x S probability block, column i for threshold i.
  Table probabilities(const Table& X) const;
  /// n x (d + S): X unchanged followed by the probability block.
  Table transform(const Table& X) const;

  friend bool operator==(const AugmentModel&, const AugmentModel&) = default;

 private:
  ThresholdSet thresholds_;
  ClassEncoding encoding_ = ClassEncoding::binary_per_threshold;
  std::vector<ForestClassifier> classifiers_;
  std::size_t input_dim_ = 0;
};

/// Seed of threshold classifier i.
std::uint64_t classifier_seed(std::uint64_t master_seed, std::size_t i);

/// Thresholds come from y_train alone; nothing but the training split is read.
AugmentModel fit_augmenter(const Table& X_train, std::span<const double> y_train, const AugmentOptions& options);

/// Versioned line-oriented text dump; doubles are written in shortest
/// round-trip form so load(save(m)) == m.
void save_augment_model(std::ostream& out, const AugmentModel& model);
AugmentModel load_augment_model(std::istream& in);

struct ArmScores {
  double rmse_train = 0.0;
  double rmse_test = 0.0;
};

struct NativeVsAugmented {
  ArmScores native;
  ArmScores augmented;
};

/// Fits `kind` with the holdout protocol on (X_train, y_train) and scores it
/// on both splits.
ArmScores evaluate_arm(const Table& X_train, std::span<const double> y_train, const Table& X_test,
                       std::span<const double> y_test, RegressorKind kind, const GridSearchSpec& grid,
                       std::uint64_t regressor_seed);

/// The native/augmented comparison on one preprocessed fold. Both arms use the
/// same regressor seed; the augmenter has its own seed in `options`. RMSE is
/// measured on the transformed target scale.
NativeVsAugmented run_native_vs_augmented(const Dataset& train, const Dataset& test, RegressorKind kind,
                                          const AugmentOptions& options, const GridSearchSpec& grid,
                                          std::uint64_t regressor_seed);

}  // namespace regaug
