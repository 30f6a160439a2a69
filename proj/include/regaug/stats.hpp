#pragma once

#include <span>
#include <vector>

#include "regaug/common.hpp"

namespace regaug {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
double incomplete_gamma_p(double a, double x);
inline double incomplete_gamma_q(double a, double x) { return 1.0 - incomplete_gamma_p(a, x); }

/// Two-sided tail probability P(|T| >= |t|) of Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

/// Upper tail P(X >= x) of a chi-square with `df` degrees of freedom.
double chi_square_sf(double x, double df);

struct PairedTTest {
  double t = 0.0;
  double p = 1.0;
  double mean_difference = 0.0;
  bool significant_at_5pct = false;
  /// The differences have zero variance; reported as a tie with p = 1.
  bool degenerate = false;
};

/// Two-sided paired t-test on d = a - b with k - 1 degrees of freedom.
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

/// Nemenyi q at alpha = 0.05 for M in [2, 10] methods.
double nemenyi_q05(std::size_t methods);

/// Ranks within one row (1 = smallest value); ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct FriedmanNemenyi {
  std::vector<double> mean_ranks;
  double statistic = 0.0;
  double p = 1.0;
  double critical_difference = 0.0;
};

/// Friedman chi-square over a datasets x methods RMSE matrix (lower is
/// better) with the Nemenyi critical difference at alpha = 0.05.
FriedmanNemenyi friedman_nemenyi(const Table& rmse);

}  // namespace regaug
