#include "regaug/discretize.hpp"

#include <algorithm>

namespace regaug {

std::string to_string(Discretization m) {
  return m == Discretization::equal_frequency ? "equal_frequency" : "equal_width";
}

Discretization parse_discretization(std::string_view s) {
  if (s == "equal_frequency") return Discretization::equal_frequency;
  if (s == "equal_width") return Discretization::equal_width;
  throw ConfigError("unknown discretization '" + std::string(s) + "'");
}

std::string to_string(ClassEncoding e) {
  return e == ClassEncoding::binary_per_threshold ? "binary_per_threshold" : "multiclass_interval";
}

ClassEncoding parse_encoding(std::string_view s) {
  if (s == "binary_per_threshold") return ClassEncoding::binary_per_threshold;
  if (s == "multiclass_interval") return ClassEncoding::multiclass_interval;
  throw ConfigError("unknown class encoding '" + std::string(s) + "'");
}

ThresholdSet equal_frequency_thresholds(std::span<const double> y, std::size_t s) {
  const std::size_t n = y.size();
  if (s == 0) throw Error("equal_frequency_thresholds: S must be >= 1");
  if (s >= n) {
    throw Error("equal_frequency_thresholds: S = " + std::to_string(s) + " needs more than " +
                std::to_string(n) + " targets");
  }
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t n_distinct = sorted.empty() ? 0 : 1;
  for (std::size_t i = 1; i < n; ++i) n_distinct += sorted[i] != sorted[i - 1];
  if (n_distinct < s + 1) {
    throw Error("equal_frequency_thresholds: " + std::to_string(n_distinct) +
                " distinct target values cannot support S = " + std::to_string(s));
  }

  ThresholdSet ts;
  ts.method = Discretization::equal_frequency;
  ts.thresholds.reserve(s);
  // Position h = (n - 1) * i / (S + 1), split exactly into integer and
  // fractional parts so the weight carries no accumulated rounding.
  const std::size_t denom = s + 1;
  for (std::size_t i = 1; i <= s; ++i) {
    const std::size_t num = (n - 1) * i;
    const std::size_t lo = num / denom;
    const double frac = static_cast<double>(num % denom) / static_cast<double>(denom);
    double q = sorted[lo];
    if (frac > 0.0) q += frac * (sorted[lo + 1] - sorted[lo]);
    if (!ts.thresholds.empty() && !(q > ts.thresholds.back())) {
      throw Error("equal_frequency_thresholds: tied targets collapse thresholds " +
                  std::to_string(i - 1) + " and " + std::to_string(i));
    }
    ts.thresholds.push_back(q);
  }
  return ts;
}

ThresholdSet equal_width_thresholds(std::span<const double> y, std::size_t s) {
  if (s == 0) throw Error("equal_width_thresholds: S must be >= 1");
  if (y.empty()) throw Error("equal_width_thresholds: empty target");
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw Error("equal_width_thresholds: constant target");
  ThresholdSet ts;
  ts.method = Discretization::equal_width;
  for (std::size_t k = 1; k <= s; ++k) {
    ts.thresholds.push_back(lo + static_cast<double>(k) * (hi - lo) / static_cast<double>(s + 1));
  }
  for (std::size_t k = 1; k < s; ++k) {
    if (!(ts.thresholds[k] > ts.thresholds[k - 1])) {
      throw Error("equal_width_thresholds: target range too narrow for S thresholds");
    }
  }
  return ts;
}

ThresholdSet make_thresholds(std::span<const double> y, std::size_t s, Discretization method) {
  return method == Discretization::equal_frequency ? equal_frequency_thresholds(y, s)
                                                   : equal_width_thresholds(y, s);
}

ClassLabels encode_labels(std::span<const double> y, const ThresholdSet& ts, ClassEncoding encoding) {
  ClassLabels out;
  out.encoding = encoding;
  if (encoding == ClassEncoding::binary_per_threshold) {
    out.binary.assign(ts.size(), std::vector<int>(y.size()));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      for (std::size_t r = 0; r < y.size(); ++r) out.binary[i][r] = y[r] <= ts.thresholds[i] ? 1 : 0;
    }
  } else {
    out.interval.resize(y.size());
    for (std::size_t r = 0; r < y.size(); ++r) {
      const auto it = std::lower_bound(ts.thresholds.begin(), ts.thresholds.end(), y[r]);
      out.interval[r] = static_cast<int>(it - ts.thresholds.begin());
    }
  }
  return out;
}

}  // namespace regaug
