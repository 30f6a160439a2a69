#pragma once

#include <span>
#include <string>
#include <vector>

#include "regaug/common.hpp"

namespace regaug {

enum class Discretization { equal_frequency, equal_width };

enum class ClassEncoding { binary_per_threshold, multiclass_interval };

std::string to_string(Discretization m);
Discretization parse_discretization(std::string_view s);
std::string to_string(ClassEncoding e);
ClassEncoding parse_encoding(std::string_view s);

/// S strictly increasing cut points over the regression target.
struct ThresholdSet {
  std::vector<double> thresholds;
  Discretization method = Discretization::equal_frequency;

  std::size_t size() const { return thresholds.size(); }
  friend bool operator==(const ThresholdSet&, const ThresholdSet&) = default;
};

/// Order-statistic interpolation at level i / (S + 1) for i = 1..S on the
/// sorted target (the h = (n - 1) p convention). Fails when ties make two
/// thresholds coincide, when y has fewer than S + 1 distinct values, or S >= n.
ThresholdSet equal_frequency_thresholds(std::span<const double> y, std::size_t s);

/// min + k (max - min) / (S + 1), k = 1..S.
ThresholdSet equal_width_thresholds(std::span<const double> y, std::size_t s);

ThresholdSet make_thresholds(std::span<const double> y, std::size_t s, Discretization method);

/// Labels for the classification subproblems.
///  binary_per_threshold: binary[i][r] = 1 if y[r] <= thresholds[i].
///  multiclass_interval:  interval[r] = number of thresholds strictly below y[r].
struct ClassLabels {
  ClassEncoding encoding = ClassEncoding::binary_per_threshold;
  std::vector<std::vector<int>> binary;
  std::vector<int> interval;
};

ClassLabels encode_labels(std::span<const double> y, const ThresholdSet& ts, ClassEncoding encoding);

}  // namespace regaug
