#include "regaug/stats.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace regaug {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw Error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete_beta: a and b must be positive");
  if (x < 0.0 || x > 1.0 || std::isnan(x)) throw Error("incomplete_beta: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double incomplete_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw Error("incomplete_gamma_p: a must be positive");
  if (x < 0.0 || std::isnan(x)) throw Error("incomplete_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  const double log_front = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < kMaxIterations; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) return sum * std::exp(log_front);
    }
    throw Error("incomplete_gamma_p: series did not converge");
  }
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return 1.0 - std::exp(log_front) * h;
  }
  throw Error("incomplete_gamma_p: continued fraction did not converge");
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error("student_t_two_sided_p: df must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  return incomplete_gamma_q(df / 2.0, x / 2.0);
}

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("paired_t_test: samples differ in length");
  if (a.size() < 2) throw Error("paired_t_test: need at least two pairs");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  PairedTTest res;
  res.mean_difference = mean(d);
  const double sd = sample_std(d);
  if (!(sd > 0.0)) {
    res.degenerate = true;
    res.t = 0.0;
    res.p = 1.0;
    return res;
  }
  const auto k = static_cast<double>(d.size());
  res.t = res.mean_difference / (sd / std::sqrt(k));
  res.p = student_t_two_sided_p(res.t, k - 1.0);
  res.significant_at_5pct = res.p < 0.05;
  return res;
}

double nemenyi_q05(std::size_t methods) {
  static constexpr std::array<double, 9> q = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
  if (methods < 2 || methods > 10) throw Error("nemenyi_q05: tabulated for 2..10 methods only");
  return q[methods - 2];
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t m = values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(m);
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j + 1 < m && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share ranks i+1..j+1.
    const double r = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

FriedmanNemenyi friedman_nemenyi(const Table& rmse) {
  const std::size_t D = rmse.rows();
  const std::size_t M = rmse.cols();
  if (D < 2 || M < 2) throw Error("friedman_nemenyi: need at least 2 datasets and 2 methods");
  FriedmanNemenyi out;
  out.mean_ranks.assign(M, 0.0);
  for (std::size_t i = 0; i < D; ++i) {
    for (double v : rmse.row(i)) {
      if (std::isnan(v)) throw Error("friedman_nemenyi: missing RMSE entry");
    }
    const auto r = average_ranks(rmse.row(i));
    for (std::size_t j = 0; j < M; ++j) out.mean_ranks[j] += r[j];
  }
  for (auto& r : out.mean_ranks) r /= static_cast<double>(D);
  const auto d = static_cast<double>(D);
  const auto m = static_cast<double>(M);
  double sum_sq = 0.0;
  for (double r : out.mean_ranks) sum_sq += r * r;
  out.statistic = 12.0 * d / (m * (m + 1.0)) * (sum_sq - m * (m + 1.0) * (m + 1.0) / 4.0);
  // Guard against a tiny negative value from cancellation when all ranks tie.
  out.statistic = std::max(0.0, out.statistic);
  out.p = chi_square_sf(out.statistic, m - 1.0);
  out.critical_difference = M <= 10 ? nemenyi_q05(M) * std::sqrt(m * (m + 1.0) / (6.0 * d))
                                    : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace regaug
