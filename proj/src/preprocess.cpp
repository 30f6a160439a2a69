#include "regaug/preprocess.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "json.hpp"

namespace regaug {

std::vector<std::string> PreprocessStats::dropped_columns() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.dropped) out.push_back(c.name);
  }
  return out;
}

double boxcox(double x, double lambda) {
  if (lambda == 0.0) return std::log(x);
  return (std::pow(x, lambda) - 1.0) / lambda;
}

double boxcox_log_likelihood(std::span<const double> values, double lambda) {
  const auto n = static_cast<double>(values.size());
  double log_sum = 0.0;
  double sum = 0.0;
  std::vector<double> t(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    log_sum += std::log(values[i]);
    t[i] = boxcox(values[i], lambda);
    sum += t[i];
  }
  const double m = sum / n;
  double ss = 0.0;
  for (double v : t) ss += (v - m) * (v - m);
  const double var = ss / n;
  if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(var) + (lambda - 1.0) * log_sum;
}

double fit_boxcox_lambda(std::span<const double> values) {
  if (values.size() < 2) throw Error("Box-Cox: need at least two values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() <= 0.0) throw Error("Box-Cox: values must be strictly positive");
  double best_lambda = -2.0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int k = -200; k <= 200; ++k) {
    const double lambda = k / 100.0;
    const double ll = boxcox_log_likelihood(sorted, lambda);
    if (ll > best_ll) {
      best_ll = ll;
      best_lambda = lambda;
    }
  }
  return best_lambda;
}

PreprocessStats fit_preprocess(const Dataset& train) {
  train.validate();
  if (train.n() == 0) throw Error("fit_preprocess: empty training split");
  if (train.has_missing()) throw Error("fit_preprocess: training split has missing cells");

  PreprocessStats stats;
  stats.columns.resize(train.d());
  for (std::size_t c = 0; c < train.d(); ++c) {
    auto& col = stats.columns[c];
    col.name = train.feature_names[c];
    col.kind = train.column_kinds[c];
    if (col.kind == ColumnKind::numeric) {
      std::vector<double> v(train.n());
      for (std::size_t r = 0; r < train.n(); ++r) v[r] = std::get<double>(train.rows[r][c]);
      col.mean = mean(v);
      col.std = sample_std(v);
      col.dropped = !(col.std > 0.0);
      if (col.dropped) col.std = 0.0;
    } else {
      std::set<std::string> vocab;
      for (const auto& row : train.rows) vocab.insert(std::get<std::string>(row[c]));
      col.categories.assign(vocab.begin(), vocab.end());
    }
  }

  stats.target_mean = mean(train.target);
  stats.target_std = sample_std(train.target);
  if (!(stats.target_std > 0.0)) {
    throw Error("fit_preprocess: target of '" + train.name + "' is constant on the training split");
  }
  std::vector<double> z = standardize_target(train.target, stats);
  const double z_min = *std::min_element(z.begin(), z.end());
  stats.boxcox_shift = std::max(0.0, kPositivityFloor - z_min);
  for (double& v : z) v = std::max(v + stats.boxcox_shift, kPositivityFloor);
  stats.boxcox_lambda = fit_boxcox_lambda(z);
  return stats;
}

namespace {

void check_layout(const Dataset& ds, const PreprocessStats& stats) {
  if (ds.d() != stats.columns.size()) {
    throw Error("preprocess: dataset has " + std::to_string(ds.d()) + " columns, stats expect " +
                std::to_string(stats.columns.size()));
  }
  for (std::size_t c = 0; c < ds.d(); ++c) {
    if (ds.feature_names[c] != stats.columns[c].name || ds.column_kinds[c] != stats.columns[c].kind) {
      throw Error("preprocess: column " + std::to_string(c) + " ('" + ds.feature_names[c] +
                  "') does not match the fitted layout");
    }
  }
}

}  // namespace

Dataset one_hot_encode(const Dataset& ds, const PreprocessStats& stats) {
  check_layout(ds, stats);
  Dataset out;
  out.name = ds.name;
  out.target = ds.target;
  for (const auto& col : stats.columns) {
    if (col.kind == ColumnKind::numeric) {
      out.feature_names.push_back(col.name);
      out.column_kinds.push_back(ColumnKind::numeric);
    } else {
      for (const auto& cat : col.categories) {
        out.feature_names.push_back(col.name + "=" + cat);
        out.column_kinds.push_back(ColumnKind::numeric);
      }
    }
  }
  out.rows.reserve(ds.n());
  for (const auto& row : ds.rows) {
    std::vector<Cell> cells;
    cells.reserve(out.d());
    for (std::size_t c = 0; c < ds.d(); ++c) {
      const auto& col = stats.columns[c];
      if (col.kind == ColumnKind::numeric) {
        cells.push_back(row[c]);
        continue;
      }
      const auto* token = std::get_if<std::string>(&row[c]);
      for (const auto& cat : col.categories) {
        cells.emplace_back(token != nullptr && *token == cat ? 1.0 : 0.0);
      }
    }
    out.rows.push_back(std::move(cells));
  }
  return out;
}

std::vector<double> standardize_target(std::span<const double> y, const PreprocessStats& stats) {
  std::vector<double> z(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) z[i] = (y[i] - stats.target_mean) / stats.target_std;
  return z;
}

Preprocessed apply_preprocess(const Dataset& ds, const PreprocessStats& stats) {
  check_layout(ds, stats);
  Preprocessed result;
  Dataset& out = result.data;
  out.name = ds.name;

  // Output layout: numeric columns standardized in place, categorical columns
  // expanded to dummies, zero-variance columns removed.
  for (const auto& col : stats.columns) {
    if (col.kind == ColumnKind::numeric) {
      if (!col.dropped) out.feature_names.push_back(col.name);
    } else {
      for (const auto& cat : col.categories) out.feature_names.push_back(col.name + "=" + cat);
    }
  }
  out.column_kinds.assign(out.feature_names.size(), ColumnKind::numeric);

  out.rows.reserve(ds.n());
  for (const auto& row : ds.rows) {
    std::vector<Cell> cells;
    cells.reserve(out.feature_names.size());
    for (std::size_t c = 0; c < ds.d(); ++c) {
      const auto& col = stats.columns[c];
      if (col.kind == ColumnKind::numeric) {
        if (col.dropped) continue;
        const auto* v = std::get_if<double>(&row[c]);
        if (v == nullptr) throw Error("apply_preprocess: missing numeric cell in '" + col.name + "'");
        cells.emplace_back((*v - col.mean) / col.std);
      } else {
        const auto* token = std::get_if<std::string>(&row[c]);
        for (const auto& cat : col.categories) {
          cells.emplace_back(token != nullptr && *token == cat ? 1.0 : 0.0);
        }
      }
    }
    out.rows.push_back(std::move(cells));
  }

  out.target.resize(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (std::isnan(ds.target[i])) {
      out.target[i] = ds.target[i];  // unlabeled row, features only
      continue;
    }
    double v = (ds.target[i] - stats.target_mean) / stats.target_std + stats.boxcox_shift;
    if (v <= 0.0) {
      v = kPositivityFloor;
      ++result.clamped_targets;
    }
    out.target[i] = boxcox(v, stats.boxcox_lambda);
  }
  return result;
}

std::string stats_to_json(const PreprocessStats& stats) {
  nlohmann::ordered_json j;
  j["target_mean"] = stats.target_mean;
  j["target_std"] = stats.target_std;
  j["boxcox_lambda"] = stats.boxcox_lambda;
  j["boxcox_shift"] = stats.boxcox_shift;
  auto cols = nlohmann::ordered_json::array();
  for (const auto& c : stats.columns) {
    nlohmann::ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = c.kind == ColumnKind::numeric ? "numeric" : "categorical";
    if (c.kind == ColumnKind::numeric) {
      jc["mean"] = c.mean;
      jc["std"] = c.std;
      jc["dropped"] = c.dropped;
    } else {
      jc["categories"] = c.categories;
    }
    cols.push_back(std::move(jc));
  }
  j["columns"] = std::move(cols);
  return j.dump(2) + "\n";
}

PreprocessStats stats_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  PreprocessStats s;
  s.target_mean = j.at("target_mean").get<double>();
  s.target_std = j.at("target_std").get<double>();
  s.boxcox_lambda = j.at("boxcox_lambda").get<double>();
  s.boxcox_shift = j.at("boxcox_shift").get<double>();
  for (const auto& jc : j.at("columns")) {
    ColumnStats c;
    c.name = jc.at("name").get<std::string>();
    c.kind = jc.at("kind").get<std::string>() == "numeric" ? ColumnKind::numeric : ColumnKind::categorical;
    if (c.kind == ColumnKind::numeric) {
      c.mean = jc.at("mean").get<double>();
      c.std = jc.at("std").get<double>();
      c.dropped = jc.at("dropped").get<bool>();
    } else {
      c.categories = jc.at("categories").get<std::vector<std::string>>();
    }
    s.columns.push_back(std::move(c));
  }
  return s;
}

}  // namespace regaug
