#include "regaug/eval.hpp"

#include <numeric>
#include <sstream>

#include "regaug/dataset.hpp"

namespace regaug {

double rmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) throw Error("rmse: length mismatch");
  if (y.empty()) throw Error("rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return std::sqrt(ss / static_cast<double>(y.size()));
}

FoldPlan kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error("kfold_split: need at least 2 folds");
  if (n < k) throw Error("kfold_split: " + std::to_string(n) + " rows cannot fill " + std::to_string(k) + " folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "kfold"));
  rng.shuffle(order);
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.fold_of.assign(n, 0);
  const std::size_t base = n / k;
  const std::size_t extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) plan.fold_of[order[pos++]] = f;
  }
  return plan;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::sizes() const {
  std::vector<std::size_t> out(k, 0);
  for (auto f : fold_of) ++out[f];
  return out;
}

std::string to_string(Arm a) { return a == Arm::native ? "native" : "augmented"; }

Arm parse_arm(std::string_view s) {
  if (s == "native") return Arm::native;
  if (s == "augmented") return Arm::augmented;
  throw Error("unknown arm '" + std::string(s) + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::loss:
      return "loss";
    case Verdict::tie:
      return "tie";
    case Verdict::win:
      return "win";
  }
  return "?";
}

void ExperimentReport::add(const CellKey& key, const CellValue& value) {
  if (value.rmse_test < 0.0 || value.rmse_train < 0.0) throw Error("ExperimentReport: negative RMSE");
  cells_[key] = value;
}

namespace {

std::string describe(const CellKey& k) {
  return k.dataset + "/" + to_string(k.regressor) + "/" + to_string(k.arm) + "/S=" + std::to_string(k.s) +
         "/fold=" + std::to_string(k.fold);
}

}  // namespace

const CellValue& ExperimentReport::at(const CellKey& key) const {
  auto it = cells_.find(key);
  if (it == cells_.end()) throw Error("missing cell " + describe(key));
  return it->second;
}

std::vector<double> ExperimentReport::test_rmses(const std::string& dataset, RegressorKind reg, Arm arm,
                                                 std::size_t s, std::size_t folds) const {
  std::vector<double> out;
  for (std::size_t f = 0; f < folds; ++f) out.push_back(at({dataset, reg, arm, s, f}).rmse_test);
  return out;
}

std::vector<double> ExperimentReport::train_rmses(const std::string& dataset, RegressorKind reg, Arm arm,
                                                  std::size_t s, std::size_t folds) const {
  std::vector<double> out;
  for (std::size_t f = 0; f < folds; ++f) out.push_back(at({dataset, reg, arm, s, f}).rmse_train);
  return out;
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "dataset,regressor,arm,S,fold,rmse_train,rmse_test\n";
  for (const auto& [k, v] : cells_) {
    out << csv_escape(k.dataset) << ',' << to_string(k.regressor) << ',' << to_string(k.arm) << ',' << k.s << ','
        << k.fold << ',' << format_double(v.rmse_train) << ',' << format_double(v.rmse_test) << '\n';
  }
  return out.str();
}

ExperimentReport ExperimentReport::from_csv(std::string_view text) {
  const CsvRows rows = parse_csv(text);
  if (rows.empty()) throw Error("cell CSV is empty");
  const std::vector<std::string> expected = {"dataset", "regressor", "arm", "S", "fold", "rmse_train", "rmse_test"};
  if (rows.front() != expected) throw Error("cell CSV has an unexpected header");
  ExperimentReport rep;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != expected.size()) throw Error("cell CSV line " + std::to_string(i + 1) + " is malformed");
    CellKey key;
    key.dataset = r[0];
    key.regressor = parse_regressor_kind(r[1]);
    key.arm = parse_arm(r[2]);
    key.s = static_cast<std::size_t>(std::stoull(r[3]));
    key.fold = static_cast<std::size_t>(std::stoull(r[4]));
    rep.add(key, {parse_double(r[5]), parse_double(r[6])});
  }
  return rep;
}

ArmComparison compare_arms(const ExperimentReport& report, const std::string& dataset, RegressorKind reg,
                           std::size_t s, std::size_t folds) {
  ArmComparison c;
  c.dataset = dataset;
  const auto native = report.test_rmses(dataset, reg, Arm::native, s, folds);
  const auto augmented = report.test_rmses(dataset, reg, Arm::augmented, s, folds);
  c.native_mean = mean(native);
  c.augmented_mean = mean(augmented);
  c.test = paired_t_test(augmented, native);
  if (c.test.significant_at_5pct) {
    c.verdict = c.augmented_mean < c.native_mean ? Verdict::win : Verdict::loss;
  }
  return c;
}

WinTieLoss win_tie_loss(const ExperimentReport& report, const std::vector<std::string>& datasets,
                        RegressorKind reg, std::size_t s, std::size_t folds) {
  WinTieLoss w;
  for (const auto& ds : datasets) {
    switch (compare_arms(report, ds, reg, s, folds).verdict) {
      case Verdict::loss:
        ++w.losses;
        break;
      case Verdict::tie:
        ++w.ties;
        break;
      case Verdict::win:
        ++w.wins;
        break;
    }
  }
  return w;
}

}  // namespace regaug
