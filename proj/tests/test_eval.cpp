#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "regaug/eval.hpp"
#include "regaug/plots.hpp"
#include "regaug/stats.hpp"

using namespace regaug;

namespace {

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

void fill_pair(ExperimentReport& rep, const std::string& ds, RegressorKind reg, std::size_t s,
               const std::vector<double>& native, const std::vector<double>& augmented) {
  for (std::size_t f = 0; f < native.size(); ++f) {
    rep.add({ds, reg, Arm::native, s, f}, {native[f] / 2, native[f]});
    rep.add({ds, reg, Arm::augmented, s, f}, {augmented[f] / 2, augmented[f]});
  }
}

}  // namespace

TEST_CASE("rmse") {
  CHECK(rmse(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)));
  CHECK(rmse(std::vector<double>{2}, std::vector<double>{-1}) == 3.0);
  CHECK_THROWS_AS(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), Error);
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> y(20), p(20);
    for (std::size_t i = 0; i < 20; ++i) {
      y[i] = rng.normal();
      p[i] = rng.normal();
    }
    const double base = rmse(y, p);
    const double c = rng.uniform(-100, 100);
    for (std::size_t i = 0; i < 20; ++i) {
      y[i] += c;
      p[i] += c;
    }
    CHECK(rmse(y, p) == doctest::Approx(base).epsilon(1e-9));
    CHECK(rmse(y, p) == rmse(p, y));
  }
}

TEST_CASE("kfold: sizes, partition, determinism") {
  const auto plan = kfold_split(103, 10, 42);
  const auto sizes = plan.sizes();
  REQUIRE(sizes.size() == 10);
  for (std::size_t f = 0; f < 10; ++f) CHECK(sizes[f] == (f < 3 ? 11u : 10u));
  std::set<std::size_t> seen;
  for (std::size_t f = 0; f < 10; ++f) {
    const auto test = plan.test_indices(f);
    const auto train = plan.train_indices(f);
    CHECK(test.size() + train.size() == 103);
    for (auto i : test) CHECK(seen.insert(i).second);
    for (auto i : train) CHECK(plan.fold_of[i] != f);
  }
  CHECK(seen.size() == 103);
  CHECK(kfold_split(103, 10, 42).fold_of == plan.fold_of);
  CHECK(kfold_split(103, 10, 43).fold_of != plan.fold_of);
  CHECK_THROWS_AS(kfold_split(5, 10, 1), Error);
  CHECK_THROWS_AS(kfold_split(50, 1, 1), Error);
}

TEST_CASE("incomplete functions: identities") {
  for (double x : {0.0, 0.1, 0.5, 0.93, 1.0}) CHECK(incomplete_beta(1, 1, x) == doctest::Approx(x));
  for (double x : {0.05, 0.3, 0.77}) {
    CHECK(incomplete_beta(2.5, 4.0, x) == doctest::Approx(1.0 - incomplete_beta(4.0, 2.5, 1.0 - x)).epsilon(1e-12));
  }
  for (double x : {0.1, 1.0, 3.5, 20.0}) CHECK(incomplete_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)));
}

TEST_CASE("paired t-test: fixed differences") {
  const std::vector<double> d = {0.9, 1.1, 1.0, 0.8, 1.2, 1.05, 0.95, 1.0, 1.1, 0.9};
  const std::vector<double> zero(10, 0.0);
  const auto res = paired_t_test(d, zero);
  const double t_oracle = oracle::mean(d) / (oracle::sd(d) / std::sqrt(10.0));
  CHECK(res.t == doctest::Approx(t_oracle).epsilon(1e-12));
  CHECK(res.t == doctest::Approx(26.833).epsilon(1e-4));
  CHECK(res.p < 1e-9);
  CHECK(res.significant_at_5pct);
  CHECK(res.mean_difference == doctest::Approx(1.0));
  const auto flipped = paired_t_test(zero, d);
  CHECK(flipped.t == -res.t);
  CHECK(flipped.p == res.p);
}

TEST_CASE("t distribution: tail matches an independent series at 20 cases") {
  const std::pair<double, int> cases[] = {{0.0, 1},  {0.5, 1},  {1.0, 2},   {2.0, 3},   {-1.3, 4}, {2.776, 4},
                                          {2.262, 9}, {0.7, 9},  {3.25, 9},  {-2.1, 10}, {1.812, 10}, {4.0, 12},
                                          {0.2, 15}, {2.131, 15}, {1.5, 20}, {-3.0, 25}, {2.0, 30}, {0.9, 40},
                                          {5.0, 7},  {10.0, 9}};
  for (const auto& [t, df] : cases) {
    CAPTURE(t);
    CAPTURE(df);
    CHECK(std::abs(student_t_two_sided_p(t, df) - oracle::t_two_sided_p(t, df)) <= 1e-9);
  }
}

TEST_CASE("t distribution: table critical values") {
  CHECK(student_t_two_sided_p(2.262, 9) == doctest::Approx(0.05).epsilon(5e-3));
  CHECK(student_t_two_sided_p(2.228, 10) == doctest::Approx(0.05).epsilon(5e-3));
  CHECK(student_t_two_sided_p(3.250, 9) == doctest::Approx(0.01).epsilon(5e-3));
  CHECK(student_t_two_sided_p(0.0, 9) == doctest::Approx(1.0));
}

TEST_CASE("paired t-test: zero-variance differences are a tie") {
  const std::vector<double> a = {1, 2, 3};
  const auto same = paired_t_test(a, a);
  CHECK(same.degenerate);
  CHECK(same.p == 1.0);
  CHECK_FALSE(same.significant_at_5pct);
  CHECK_THROWS_AS(paired_t_test(a, std::vector<double>{1, 2}), Error);
}

TEST_CASE("chi-square tail matches the closed form for even df") {
  for (int df : {2, 4, 6, 10}) {
    for (double x : {0.1, 1.0, 2.6667, 5.99, 12.0, 30.0}) {
      CHECK(chi_square_sf(x, df) == doctest::Approx(oracle::chi2_sf_even(x, df)).epsilon(1e-10));
    }
  }
  CHECK(chi_square_sf(3.841, 1) == doctest::Approx(0.05).epsilon(1e-3));
}

TEST_CASE("average ranks share ties") {
  CHECK(average_ranks(std::vector<double>{3, 1, 2}) == std::vector<double>{3, 1, 2});
  CHECK(average_ranks(std::vector<double>{0.5, 0.5, 0.1}) == std::vector<double>{2.5, 2.5, 1});
}

TEST_CASE("friedman: 3 x 3 hand computation") {
  const Table m(3, 3, std::vector<double>{1, 2, 3, 1, 3, 2, 2, 1, 3});
  const auto fr = friedman_nemenyi(m);
  CHECK(fr.mean_ranks[0] == doctest::Approx(4.0 / 3.0));
  CHECK(fr.mean_ranks[1] == doctest::Approx(2.0));
  CHECK(fr.mean_ranks[2] == doctest::Approx(8.0 / 3.0));
  CHECK(fr.statistic == doctest::Approx(8.0 / 3.0));
  CHECK(fr.p == doctest::Approx(std::exp(-4.0 / 3.0)));
  CHECK(fr.critical_difference == doctest::Approx(2.343 * std::sqrt(12.0 / 18.0)));
}

TEST_CASE("friedman: identical columns, monotone invariance, rank sums") {
  const Table same(4, 2, std::vector<double>{1, 1, 2, 2, 0.5, 0.5, 7, 7});
  const auto fr = friedman_nemenyi(same);
  CHECK(fr.mean_ranks == std::vector<double>{1.5, 1.5});
  CHECK(fr.statistic == 0.0);
  Rng rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + rng.index(20);
    const std::size_t m = 2 + rng.index(9);
    Table t(d, m);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < m; ++c) t(r, c) = rng.uniform(0.1, 5.0);
    }
    const auto a = friedman_nemenyi(t);
    Table warped = t;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < m; ++c) warped(r, c) = std::exp(3.0 * t(r, c)) + std::log(t(r, c));
    }
    const auto b = friedman_nemenyi(warped);
    CHECK(a.mean_ranks == b.mean_ranks);
    CHECK(a.statistic == b.statistic);
    CHECK(std::accumulate(a.mean_ranks.begin(), a.mean_ranks.end(), 0.0) ==
          doctest::Approx(static_cast<double>(m * (m + 1)) / 2.0));
    CHECK(a.p >= 0.0);
    CHECK(a.p <= 1.0);
  }
}

TEST_CASE("nemenyi critical difference") {
  CHECK(nemenyi_q05(2) == 1.960);
  CHECK(nemenyi_q05(5) == 2.728);
  CHECK(nemenyi_q05(10) == 3.164);
  CHECK_THROWS_AS(nemenyi_q05(11), Error);
  Table t(33, 5);
  Rng rng(1);
  for (std::size_t r = 0; r < 33; ++r) {
    for (std::size_t c = 0; c < 5; ++c) t(r, c) = rng.uniform();
  }
  // q * sqrt(M (M + 1) / (6 D)) with M = 5, D = 33.
  const double cd = friedman_nemenyi(t).critical_difference;
  CHECK(cd == doctest::Approx(2.728 * std::sqrt(30.0 / 198.0)));
  CHECK(cd == doctest::Approx(1.0619).epsilon(1e-4));
}

TEST_CASE("report: cells, csv round trip, missing cells") {
  ExperimentReport rep;
  fill_pair(rep, "a", RegressorKind::tree, 4, {1, 2, 3}, {0.5, 1.5, 2.5});
  CHECK(rep.size() == 6);
  CHECK(rep.test_rmses("a", RegressorKind::tree, Arm::augmented, 4, 3) == std::vector<double>{0.5, 1.5, 2.5});
  CHECK(rep.train_rmses("a", RegressorKind::tree, Arm::native, 4, 3) == std::vector<double>{0.5, 1, 1.5});
  CHECK_THROWS_AS(rep.test_rmses("a", RegressorKind::tree, Arm::native, 4, 4), Error);
  CHECK_THROWS_AS(rep.add({"a", RegressorKind::tree, Arm::native, 4, 0}, {-1.0, 1.0}), Error);
  const auto csv = rep.to_csv();
  CHECK(csv.rfind("dataset,regressor,arm,S,fold,rmse_train,rmse_test\n", 0) == 0);
  const auto back = ExperimentReport::from_csv(csv);
  CHECK(back.size() == rep.size());
  CHECK(back.to_csv() == csv);
  CHECK(parse_arm(to_string(Arm::augmented)) == Arm::augmented);
}

TEST_CASE("win / tie / loss") {
  ExperimentReport rep;
  const std::vector<double> base = {1.0, 1.2, 0.9, 1.1, 1.05, 0.95, 1.0, 1.15, 0.85, 1.0};
  std::vector<double> better = base, worse = base, noisy = base;
  for (std::size_t f = 0; f < 10; ++f) {
    better[f] -= 0.2 + 0.01 * static_cast<double>(f % 3);
    worse[f] += 0.3 + 0.02 * static_cast<double>(f % 2);
    noisy[f] += f % 2 ? 0.05 : -0.05;
  }
  fill_pair(rep, "win", RegressorKind::linear, 8, base, better);
  fill_pair(rep, "loss", RegressorKind::linear, 8, base, worse);
  fill_pair(rep, "tie", RegressorKind::linear, 8, base, noisy);
  fill_pair(rep, "same", RegressorKind::linear, 8, base, base);
  CHECK(compare_arms(rep, "win", RegressorKind::linear, 8, 10).verdict == Verdict::win);
  CHECK(compare_arms(rep, "loss", RegressorKind::linear, 8, 10).verdict == Verdict::loss);
  CHECK(compare_arms(rep, "tie", RegressorKind::linear, 8, 10).verdict == Verdict::tie);
  CHECK(compare_arms(rep, "same", RegressorKind::linear, 8, 10).verdict == Verdict::tie);
  const auto wtl = win_tie_loss(rep, {"win", "loss", "tie", "same"}, RegressorKind::linear, 8, 10);
  CHECK(wtl == WinTieLoss{1, 2, 1});
  CHECK(wtl.losses + wtl.ties + wtl.wins == 4);
  CHECK(to_string(Verdict::win) != to_string(Verdict::loss));
}

TEST_CASE("cd cliques") {
  CHECK(cd_cliques({1, 2, 3}, 5.0) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}});
  CHECK(cd_cliques({1, 3.5}, 1.0).empty());
  CHECK(cd_cliques({1, 1.5, 3, 3.2}, 1.0) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {2, 3}});
  CHECK(cd_cliques({1, 1.8, 2.6}, 1.0) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}});
  CHECK(cd_cliques({1, 2}, 0.0).empty());
}

TEST_CASE("cd diagram svg") {
  SUBCASE("single method: one marker, no bars") {
    const auto svg = cd_diagram_svg({"only"}, {1.0}, 1.0);
    CHECK(count_of(svg, "class=\"method\"") == 1);
    CHECK(count_of(svg, "class=\"clique\"") == 0);
  }
  SUBCASE("gap above the CD: no bar") {
    const auto svg = cd_diagram_svg({"a", "b"}, {1.0, 2.0}, 0.5);
    CHECK(count_of(svg, "class=\"method\"") == 2);
    CHECK(count_of(svg, "class=\"clique\"") == 0);
    CHECK(count_of(svg, "class=\"cd\"") == 1);
  }
  SUBCASE("all within the CD: one bar") {
    const auto svg = cd_diagram_svg({"a", "b", "c", "d", "e"}, {2.9, 3.1, 2.7, 3.3, 3.0}, 1.064, "t");
    CHECK(count_of(svg, "class=\"method\"") == 5);
    CHECK(count_of(svg, "class=\"clique\"") == 1);
    CHECK(count_of(svg, "class=\"tick\"") == 5);
    CHECK(svg == cd_diagram_svg({"a", "b", "c", "d", "e"}, {2.9, 3.1, 2.7, 3.3, 3.0}, 1.064, "t"));
  }
  SUBCASE("markers carry the ranks in ascending order") {
    const auto svg = cd_diagram_svg({"x", "y"}, {1.75, 1.25}, 2.0);
    CHECK(svg.find("data-rank=\"1.25\"") < svg.find("data-rank=\"1.75\""));
  }
}

TEST_CASE("s curve") {
  ExperimentReport rep;
  const std::vector<std::size_t> ss = {1, 2, 4, 8};
  for (std::size_t s : ss) {
    for (std::size_t f = 0; f < 3; ++f) {
      rep.add({"d", RegressorKind::forest, Arm::native, s, f}, {0.5, 2.0});
      rep.add({"d", RegressorKind::forest, Arm::augmented, s, f}, {0.25, 2.0 / static_cast<double>(s)});
    }
  }
  const auto c = s_curve_data(rep, "d", RegressorKind::forest, ss, 3);
  CHECK(c.native_test == 2.0);
  CHECK(c.native_train == 0.5);
  CHECK(c.augmented_test == std::vector<double>{2.0, 1.0, 0.5, 0.25});
  for (std::size_t i = 1; i < 4; ++i) CHECK(c.augmented_test[i] < c.augmented_test[i - 1]);
  const auto svg = s_curve_svg(c, "d / forest");
  CHECK(svg.find("class=\"augmented-test\" data-values=\"2 1 0.5 0.25\"") != std::string::npos);
  CHECK(svg.find("class=\"native-test\" data-value=\"2\"") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(s_curve_svg(c, "d / forest") == svg);

  SCurve flat;
  flat.s_values = {1, 32};
  flat.augmented_test = {1.0, 1.0};
  flat.augmented_train = {1.0, 1.0};
  flat.native_test = flat.native_train = 1.0;
  const auto fsvg = s_curve_svg(flat);
  CHECK(fsvg.find("nan") == std::string::npos);
  CHECK(count_of(fsvg, "data-values=\"1 1\"") == 2);
  CHECK_THROWS_AS(s_curve_data(rep, "d", RegressorKind::tree, ss, 3), Error);
}

TEST_CASE("atomic write") {
  const auto dir = testutil::temp_dir("atomic");
  write_file_atomic(dir / "x.txt", "first");
  write_file_atomic(dir / "x.txt", "second");
  CHECK(read_file(dir / "x.txt") == "second");
  CHECK_FALSE(std::filesystem::exists(dir / "x.txt.tmp"));
}
