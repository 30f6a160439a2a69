#include "regaug/pipeline.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include "json.hpp"
#include "regaug/augment.hpp"
#include "regaug/dataset.hpp"
#include "regaug/plots.hpp"
#include "regaug/preprocess.hpp"
#include "regaug/stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace regaug {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string two_digits(std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02zu", v);
  return buf;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<Hyperparams> parse_grid_cells(const json& arr, RegressorKind kind) {
  if (!arr.is_array() || arr.empty()) throw ConfigError("grid for " + to_string(kind) + " must be a non-empty list");
  std::vector<Hyperparams> out;
  for (const auto& cell : arr) {
    if (!cell.is_object()) throw ConfigError("grid cells must be objects");
    Hyperparams h;
    h.max_depth = get_or<int>(cell, "max_depth", kind == RegressorKind::gbt ? 3 : -1);
    h.min_samples_leaf = get_count(cell, "min_samples_leaf", 1);
    if (kind == RegressorKind::gbt) {
      h.n_trees = get_count(cell, "n_stages", 100);
      h.learning_rate = get_or<double>(cell, "learning_rate", 0.1);
    } else {
      h.n_trees = get_count(cell, "n_trees", 100);
    }
    out.push_back(h);
  }
  return out;
}

std::string grid_signature(const GridSearchSpec& g, RegressorKind kind) {
  if (kind == RegressorKind::linear) return "ols";
  std::string out = "holdout=" + format_double(g.holdout_fraction) + " min=" + std::to_string(g.min_holdout_rows);
  for (const auto& h : g.grid(kind)) out += ";" + h.describe(kind);
  return out;
}

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("output directory '" + dir.string() + "' cannot be created: " + ec.message());
  const fs::path probe = dir / ".regaug-probe";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

std::mutex log_mutex;

void log_line(const std::string& msg) {
  std::lock_guard lock(log_mutex);
  std::cerr << msg << '\n';
}

std::string file_hash(const fs::path& p) { return hex64(fnv1a64(read_file(p))); }

// ---------------------------------------------------------------- jobs

struct Job {
  std::string dataset;
  std::size_t fold = 0;
  Arm arm = Arm::native;
  std::size_t s = 0;  // augmented only

  std::string label() const {
    std::string out = dataset + " fold " + std::to_string(fold) + " " + to_string(arm);
    if (arm == Arm::augmented) out += " S=" + std::to_string(s);
    return out;
  }
};

std::vector<Job> plan_jobs(const ExperimentConfig& cfg) {
  std::vector<Job> jobs;
  for (const auto& ds : cfg.datasets) {
    for (std::size_t f = 0; f < cfg.folds; ++f) {
      jobs.push_back({ds.name, f, Arm::native, 0});
      for (std::size_t s : cfg.s_values) jobs.push_back({ds.name, f, Arm::augmented, s});
    }
  }
  return jobs;
}

// The config slice a job depends on. Any change produces a new file name.
std::string job_key(const ExperimentConfig& cfg, const Job& job, const std::string& data_hash) {
  std::ostringstream k;
  k << "regaug-job 1\n";
  k << "dataset=" << job.dataset << "\nfold=" << job.fold << "\nfolds=" << cfg.folds << "\narm=" << to_string(job.arm)
    << "\nseed=" << cfg.seed << "\ndata=" << data_hash << '\n';
  for (auto kind : cfg.regressors) k << "regressor=" << to_string(kind) << " grid=" << grid_signature(cfg.grid, kind) << '\n';
  if (job.arm == Arm::augmented) {
    k << "S=" << job.s << "\ntrees=" << cfg.n_trees << "\nmethod=" << to_string(cfg.discretization)
      << "\nencoding=" << to_string(cfg.encoding) << '\n';
  }
  return k.str();
}

fs::path job_path(const ExperimentConfig& cfg, const Job& job, const std::string& key) {
  std::string name = (job.arm == Arm::native ? "native" : "augmented") + std::string("_f") + two_digits(job.fold);
  if (job.arm == Arm::augmented) name += "_s" + std::to_string(job.s);
  name += "_" + hex64(fnv1a64(key)) + ".json";
  return cfg.output_dir / "cells" / job.dataset / name;
}

struct JobResult {
  std::vector<std::pair<RegressorKind, CellValue>> cells;
  std::size_t probabilities = 0;
  std::size_t off_grid = 0;
};

// A vote fraction over T trees must sit on the 1/T grid.
bool on_vote_grid(double p, std::size_t trees) {
  if (!(p >= 0.0 && p <= 1.0)) return false;
  const double scaled = p * static_cast<double>(trees);
  return std::abs(scaled - std::round(scaled)) <= 1e-9 * static_cast<double>(trees);
}

JobResult execute_job(const ExperimentConfig& cfg, const Job& job) {
  const fs::path dir = fold_dir(cfg, job.dataset, job.fold);
  const Dataset train = read_numeric_dataset(dir / "train.csv", job.dataset);
  const Dataset test = read_numeric_dataset(dir / "test.csv", job.dataset);
  Table X_train = train.features();
  Table X_test = test.features();
  JobResult res;
  if (job.arm == Arm::augmented) {
    AugmentOptions opt;
    opt.s = job.s;
    opt.method = cfg.discretization;
    opt.encoding = cfg.encoding;
    opt.n_trees = cfg.n_trees;
    opt.seed = augmenter_seed(cfg.seed, job.dataset, job.fold, job.s);
    const AugmentModel model = fit_augmenter(X_train, train.target, opt);
    X_train = model.transform(X_train);
    X_test = model.transform(X_test);
    for (const Table* t : {&X_train, &X_test}) {
      for (std::size_t r = 0; r < t->rows(); ++r) {
        for (std::size_t c = model.input_dim(); c < t->cols(); ++c) {
          ++res.probabilities;
          if (!on_vote_grid((*t)(r, c), cfg.n_trees)) ++res.off_grid;
        }
      }
    }
  }
  for (auto kind : cfg.regressors) {
    const ArmScores sc = evaluate_arm(X_train, train.target, X_test, test.target, kind, cfg.grid,
                                      regressor_seed(cfg.seed, job.dataset, job.fold, kind));
    res.cells.emplace_back(kind, CellValue{sc.rmse_train, sc.rmse_test});
  }
  return res;
}

std::string job_to_json(const Job& job, const std::string& key, const JobResult& r) {
  json j;
  j["key"] = key;
  j["dataset"] = job.dataset;
  j["fold"] = job.fold;
  j["arm"] = to_string(job.arm);
  j["S"] = job.s;
  json cells = json::array();
  for (const auto& [kind, v] : r.cells) {
    cells.push_back({{"regressor", to_string(kind)},
                     {"rmse_train", format_double(v.rmse_train)},
                     {"rmse_test", format_double(v.rmse_test)}});
  }
  j["cells"] = cells;
  j["audit"] = {{"probabilities", r.probabilities}, {"off_grid", r.off_grid}};
  return j.dump(1) + "\n";
}

std::optional<JobResult> load_job(const fs::path& path, const std::string& key) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    const json j = json::parse(read_file(path));
    if (j.at("key").get<std::string>() != key) return std::nullopt;
    JobResult r;
    for (const auto& c : j.at("cells")) {
      r.cells.emplace_back(parse_regressor_kind(c.at("regressor").get<std::string>()),
                           CellValue{parse_double(c.at("rmse_train").get<std::string>()),
                                     parse_double(c.at("rmse_test").get<std::string>())});
    }
    r.probabilities = j.at("audit").at("probabilities").get<std::size_t>();
    r.off_grid = j.at("audit").at("off_grid").get<std::size_t>();
    return r;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable leftovers are recomputed
  }
}

void check_prep(const ExperimentConfig& cfg, const DatasetEntry& ds) {
  const fs::path manifest = prep_dir(cfg, ds.name) / "manifest.json";
  const std::string hint = "; run `regaug prep` with this config first";
  if (!fs::exists(manifest)) throw ConfigError("no prep artifacts for '" + ds.name + "' (" + manifest.string() + ")" + hint);
  json j;
  try {
    j = json::parse(read_file(manifest));
  } catch (const json::exception& e) {
    throw ConfigError("unreadable manifest " + manifest.string() + ": " + e.what());
  }
  if (j.value("folds", std::size_t{0}) != cfg.folds || j.value("seed", std::uint64_t{0}) != cfg.seed ||
      j.value("source_fnv", std::string{}) != file_hash(ds.csv)) {
    throw ConfigError("prep artifacts for '" + ds.name + "' do not match the config" + hint);
  }
  for (std::size_t f = 0; f < cfg.folds; ++f) {
    const fs::path dir = fold_dir(cfg, ds.name, f);
    if (!fs::exists(dir / "train.csv") || !fs::exists(dir / "test.csv")) {
      throw ConfigError("missing fold files in " + dir.string() + hint);
    }
  }
}

json friedman_panel(const ExperimentReport& rep, const ExperimentConfig& cfg, const std::vector<std::string>& names,
                    const std::vector<std::pair<RegressorKind, Arm>>& methods, const std::string& tag,
                    std::ostringstream& text) {
  json panel;
  panel["panel"] = tag;
  const std::size_t D = cfg.datasets.size();
  const std::size_t M = methods.size();
  if (D < 2 || M < 2) {
    const std::string why = D < 2 ? "need at least 2 datasets, have " + std::to_string(D)
                                  : "need at least 2 methods, have " + std::to_string(M);
    panel["skipped"] = why;
    text << "friedman[" << tag << "]: skipped (" << why << ")\n";
    return panel;
  }
  const std::size_t s = cfg.report_s();
  Table m(D, M);
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      m(i, j) = mean(rep.test_rmses(cfg.datasets[i].name, methods[j].first, methods[j].second, s, cfg.folds));
    }
  }
  const FriedmanNemenyi fn = friedman_nemenyi(m);
  panel["methods"] = names;
  json ranks = json::array();
  for (double r : fn.mean_ranks) ranks.push_back(format_double(r));
  panel["mean_ranks"] = ranks;
  panel["friedman_statistic"] = format_double(fn.statistic);
  panel["p"] = format_double(fn.p);
  panel["critical_difference"] = format_double(fn.critical_difference);
  text << "friedman[" << tag << "]: chi2 = " << format_double(fn.statistic) << ", p = " << format_double(fn.p)
       << ", CD = " << format_double(fn.critical_difference) << '\n';
  for (std::size_t j = 0; j < M; ++j) text << "  mean rank " << names[j] << " = " << format_double(fn.mean_ranks[j]) << '\n';
  emit_cd_diagram(names, fn.mean_ranks, fn.critical_difference, report_dir(cfg) / ("cd_" + tag + ".svg"),
                  tag + " (S=" + std::to_string(s) + ")");
  return panel;
}

struct ModelBundle {
  PreprocessStats stats;
  AugmentModel model;
};

void save_bundle(const fs::path& path, const ModelBundle& b) {
  std::ostringstream out;
  const std::string stats = stats_to_json(b.stats);
  out << "regaug-augment-bundle 1\nstats " << stats.size() << '\n' << stats << '\n';
  save_augment_model(out, b.model);
  write_file_atomic(path, out.str());
}

ModelBundle load_bundle(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line) || line != "regaug-augment-bundle 1") {
    throw Error("'" + path.string() + "' is not an augmentation model bundle");
  }
  std::string tag;
  std::size_t len = 0;
  if (!(in >> tag >> len) || tag != "stats") throw Error("corrupt model bundle " + path.string());
  in.get();
  std::string stats(len, '\0');
  in.read(stats.data(), static_cast<std::streamsize>(len));
  in.get();
  ModelBundle b;
  b.stats = stats_from_json(stats);
  b.model = load_augment_model(in);
  return b;
}

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig ExperimentConfig::parse(std::string_view text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"datasets", "regressors", "s_values", "table_s",  "discretization",
                                              "encoding", "seed",       "folds",    "trees",    "threads",
                                              "output_dir", "grid"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };

  ExperimentConfig cfg;
  if (j.contains("datasets")) {
    if (!j["datasets"].is_array()) throw ConfigError("'datasets' must be a list");
    for (const auto& d : j["datasets"]) {
      if (!d.is_object() || !d.contains("csv") || !d.contains("schema")) {
        throw ConfigError("each dataset entry needs 'csv' and 'schema'");
      }
      DatasetEntry e;
      e.csv = resolve(d["csv"].get<std::string>());
      e.schema = resolve(d["schema"].get<std::string>());
      e.name = d.contains("name") ? d["name"].get<std::string>() : e.csv.stem().string();
      cfg.datasets.push_back(std::move(e));
    }
  }
  if (j.contains("regressors")) {
    if (!j["regressors"].is_array()) throw ConfigError("'regressors' must be a list");
    for (const auto& r : j["regressors"]) cfg.regressors.push_back(parse_regressor_kind(r.get<std::string>()));
  }
  if (j.contains("s_values")) {
    if (!j["s_values"].is_array()) throw ConfigError("'s_values' must be a list");
    cfg.s_values.clear();
    for (const auto& s : j["s_values"]) {
      if (!s.is_number_integer() || s.get<long long>() < 1) throw ConfigError("S values must be integers >= 1");
      cfg.s_values.push_back(s.get<std::size_t>());
    }
  }
  cfg.table_s = get_count(j, "table_s", 0);
  if (j.contains("discretization")) cfg.discretization = parse_discretization(j["discretization"].get<std::string>());
  if (j.contains("encoding")) cfg.encoding = parse_encoding(j["encoding"].get<std::string>());
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.folds = get_count(j, "folds", cfg.folds);
  cfg.n_trees = get_count(j, "trees", cfg.n_trees);
  cfg.threads = get_count(j, "threads", cfg.threads);
  if (j.contains("output_dir")) cfg.output_dir = resolve(j["output_dir"].get<std::string>());
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (!g.is_object()) throw ConfigError("'grid' must be an object");
    if (g.contains("tree")) cfg.grid.tree = parse_grid_cells(g["tree"], RegressorKind::tree);
    if (g.contains("forest")) cfg.grid.forest = parse_grid_cells(g["forest"], RegressorKind::forest);
    if (g.contains("gbt")) cfg.grid.gbt = parse_grid_cells(g["gbt"], RegressorKind::gbt);
    cfg.grid.holdout_fraction = get_or<double>(g, "holdout_fraction", cfg.grid.holdout_fraction);
    cfg.grid.min_holdout_rows = get_count(g, "min_holdout_rows", cfg.grid.min_holdout_rows);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
  ExperimentConfig cfg = parse(read_file(path), path.parent_path());
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') cfg.output_dir = env;
  return cfg;
}

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError("config lists no datasets");
  if (regressors.empty()) throw ConfigError("config lists no regressors");
  if (s_values.empty()) throw ConfigError("config lists no S values");
  std::set<std::string> names;
  for (const auto& d : datasets) {
    if (d.name.empty()) throw ConfigError("dataset name must not be empty");
    if (!names.insert(d.name).second) throw ConfigError("duplicate dataset name '" + d.name + "'");
  }
  std::set<RegressorKind> kinds(regressors.begin(), regressors.end());
  if (kinds.size() != regressors.size()) throw ConfigError("duplicate regressor in config");
  std::set<std::size_t> s_set(s_values.begin(), s_values.end());
  if (s_set.size() != s_values.size()) throw ConfigError("duplicate S value in config");
  if (s_set.contains(0)) throw ConfigError("S values must be >= 1");
  if (table_s != 0 && !s_set.contains(table_s)) throw ConfigError("table_s must be one of s_values");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (n_trees < 1) throw ConfigError("trees must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  try {
    grid.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::size_t ExperimentConfig::report_s() const {
  if (table_s != 0) return table_s;
  return *std::max_element(s_values.begin(), s_values.end());
}

fs::path prep_dir(const ExperimentConfig& cfg, const std::string& dataset) { return cfg.output_dir / "prep" / dataset; }

fs::path fold_dir(const ExperimentConfig& cfg, const std::string& dataset, std::size_t fold) {
  return prep_dir(cfg, dataset) / ("fold_" + two_digits(fold));
}

fs::path cells_csv_path(const ExperimentConfig& cfg) { return cfg.output_dir / "cells.csv"; }
fs::path report_dir(const ExperimentConfig& cfg) { return cfg.output_dir / "report"; }

std::uint64_t fold_plan_seed(std::uint64_t master, const std::string& dataset) {
  return derive_seed(master, "folds|" + dataset);
}

std::uint64_t regressor_seed(std::uint64_t master, const std::string& dataset, std::size_t fold, RegressorKind kind) {
  return derive_seed(master, "regressor|" + dataset + "|" + to_string(kind), fold);
}

std::uint64_t augmenter_seed(std::uint64_t master, const std::string& dataset, std::size_t fold, std::size_t s) {
  return derive_seed(derive_seed(master, "augmenter|" + dataset, fold), s);
}

// ---------------------------------------------------------------- commands

void cmd_prep(const ExperimentConfig& cfg) {
  cfg.validate();
  ensure_writable(cfg.output_dir);
  for (const auto& entry : cfg.datasets) {
    if (!fs::exists(entry.schema)) throw ConfigError("schema file not found: " + entry.schema.string());
    if (!fs::exists(entry.csv)) throw ConfigError("dataset file not found: " + entry.csv.string());
    const Schema schema = Schema::load(entry.schema);
    Dataset raw = load_csv(entry.csv, schema);
    raw.name = entry.name;
    const Dataset ds = drop_missing_rows(raw);
    const FoldPlan plan = kfold_split(ds.n(), cfg.folds, fold_plan_seed(cfg.seed, entry.name));

    json manifest;
    manifest["dataset"] = entry.name;
    manifest["source_fnv"] = file_hash(entry.csv);
    manifest["rows_raw"] = raw.n();
    manifest["rows_complete"] = ds.n();
    manifest["folds"] = cfg.folds;
    manifest["seed"] = cfg.seed;
    manifest["fold_sizes"] = plan.sizes();
    json folds = json::array();
    for (std::size_t f = 0; f < cfg.folds; ++f) {
      const auto train_idx = plan.train_indices(f);
      const auto test_idx = plan.test_indices(f);
      const Dataset train = ds.subset(train_idx);
      const Dataset test = ds.subset(test_idx);
      const PreprocessStats stats = fit_preprocess(train);
      const Preprocessed ptrain = apply_preprocess(train, stats);
      const Preprocessed ptest = apply_preprocess(test, stats);
      const fs::path dir = fold_dir(cfg, entry.name, f);
      fs::create_directories(dir);
      write_numeric_dataset(dir / "train.csv", ptrain.data);
      write_numeric_dataset(dir / "test.csv", ptest.data);
      write_file_atomic(dir / "stats.json", stats_to_json(stats) + "\n");
      json fj;
      fj["fold"] = f;
      fj["train_rows"] = train.n();
      fj["test_rows"] = test.n();
      fj["features"] = ptrain.data.feature_names;
      fj["dropped_columns"] = stats.dropped_columns();
      fj["clamped_test_targets"] = ptest.clamped_targets;
      fj["boxcox_lambda"] = format_double(stats.boxcox_lambda);
      folds.push_back(fj);
    }
    manifest["fold_details"] = folds;
    write_file_atomic(prep_dir(cfg, entry.name) / "manifest.json", manifest.dump(1) + "\n");
    log_line("[prep] " + entry.name + ": " + std::to_string(ds.n()) + " rows, " + std::to_string(cfg.folds) + " folds");
  }
}

RunSummary cmd_run(const ExperimentConfig& cfg, bool resume) {
  cfg.validate();
  ensure_writable(cfg.output_dir);
  std::map<std::string, std::vector<std::string>> data_hashes;
  for (const auto& ds : cfg.datasets) {
    check_prep(cfg, ds);
    for (std::size_t f = 0; f < cfg.folds; ++f) {
      const fs::path dir = fold_dir(cfg, ds.name, f);
      data_hashes[ds.name].push_back(hex64(fnv1a64(read_file(dir / "train.csv") + "\x1f" + read_file(dir / "test.csv"))));
    }
  }

  const std::vector<Job> jobs = plan_jobs(cfg);
  std::vector<std::string> keys(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) keys[i] = job_key(cfg, jobs[i], data_hashes[jobs[i].dataset][jobs[i].fold]);

  std::vector<std::optional<JobResult>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::vector<char> reused(jobs.size(), 0);
  std::mutex write_mutex;  // job files go through one writer at a time
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    const fs::path path = job_path(cfg, jobs[i], keys[i]);
    if (resume) {
      if (auto r = load_job(path, keys[i])) {
        results[i] = std::move(r);
        reused[i] = 1;
        return;
      }
    }
    try {
      JobResult r = execute_job(cfg, jobs[i]);
      {
        std::lock_guard lock(write_mutex);
        write_file_atomic(path, job_to_json(jobs[i], keys[i], r));
      }
      results[i] = std::move(r);
      log_line("[run] done " + jobs[i].label());
    } catch (const std::exception& e) {
      errors[i] = e.what();
      log_line("[run] FAILED " + jobs[i].label() + ": " + e.what());
    }
  });

  RunSummary summary;
  summary.jobs = jobs.size();
  std::vector<std::string> failed;
  ExperimentReport report;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    if (!results[i]) {
      for (auto kind : cfg.regressors) {
        failed.push_back(job.label() + " " + to_string(kind) + ": " + errors[i]);
      }
      continue;
    }
    (reused[i] ? summary.resumed : summary.computed) += 1;
    summary.probabilities += results[i]->probabilities;
    summary.off_grid_probabilities += results[i]->off_grid;
    for (const auto& [kind, value] : results[i]->cells) {
      if (job.arm == Arm::native) {
        for (std::size_t s : cfg.s_values) report.add({job.dataset, kind, Arm::native, s, job.fold}, value);
      } else {
        report.add({job.dataset, kind, Arm::augmented, job.s, job.fold}, value);
      }
    }
  }
  if (!failed.empty()) {
    std::string msg = std::to_string(failed.size()) + " cell(s) failed:";
    for (const auto& f : failed) msg += "\n  " + f;
    write_file_atomic(cfg.output_dir / "failed_cells.txt", msg + "\n");
    throw RunFailure(msg, failed);
  }
  std::error_code ec;
  fs::remove(cfg.output_dir / "failed_cells.txt", ec);
  summary.cells = report.size();
  write_file_atomic(cells_csv_path(cfg), report.to_csv());
  json audit;
  audit["jobs"] = summary.jobs;
  audit["cells"] = summary.cells;
  audit["probabilities"] = summary.probabilities;
  audit["off_grid_probabilities"] = summary.off_grid_probabilities;
  audit["trees"] = cfg.n_trees;
  write_file_atomic(cfg.output_dir / "run_audit.json", audit.dump(1) + "\n");
  log_line("[run] " + std::to_string(summary.cells) + " cells (" + std::to_string(summary.computed) + " jobs computed, " +
           std::to_string(summary.resumed) + " resumed)");
  return summary;
}

void cmd_report(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path csv = cells_csv_path(cfg);
  if (!fs::exists(csv)) throw ConfigError("no cell CSV at " + csv.string() + "; run `regaug run` first");
  const ExperimentReport rep = ExperimentReport::from_csv(read_file(csv));

  std::vector<std::string> missing;
  for (const auto& ds : cfg.datasets) {
    for (auto kind : cfg.regressors) {
      for (Arm arm : {Arm::native, Arm::augmented}) {
        for (std::size_t s : cfg.s_values) {
          for (std::size_t f = 0; f < cfg.folds; ++f) {
            if (!rep.contains({ds.name, kind, arm, s, f})) {
              missing.push_back(ds.name + "/" + to_string(kind) + "/" + to_string(arm) + "/S=" + std::to_string(s) +
                                "/fold=" + std::to_string(f));
            }
          }
        }
      }
    }
  }
  if (!missing.empty()) {
    std::string msg = "cell CSV is incomplete; " + std::to_string(missing.size()) + " missing cell(s):";
    for (const auto& m : missing) msg += "\n  " + m;
    throw Error(msg);
  }

  const fs::path out = report_dir(cfg);
  fs::create_directories(out);
  const std::size_t s_table = cfg.report_s();
  std::vector<std::string> names;
  for (const auto& d : cfg.datasets) names.push_back(d.name);

  std::ostringstream text;
  json summary;
  summary["folds"] = cfg.folds;
  summary["S"] = s_table;
  text << "datasets: " << cfg.datasets.size() << ", folds: " << cfg.folds << ", S for tables: " << s_table << "\n\n";

  text << "win/tie/loss of augmented vs native (paired t-test, 5%), reported as loss / tie / win\n";
  json wtl = json::array();
  for (auto kind : cfg.regressors) {
    const WinTieLoss w = win_tie_loss(rep, names, kind, s_table, cfg.folds);
    text << "  " << to_string(kind) << ": " << w.losses << " / " << w.ties << " / " << w.wins << '\n';
    wtl.push_back({{"regressor", to_string(kind)}, {"losses", w.losses}, {"ties", w.ties}, {"wins", w.wins}});
  }
  summary["win_tie_loss"] = wtl;

  text << "\nper-dataset mean test RMSE\n";
  json comparisons = json::array();
  for (auto kind : cfg.regressors) {
    for (std::size_t s : cfg.s_values) {
      for (const auto& ds : names) {
        const ArmComparison c = compare_arms(rep, ds, kind, s, cfg.folds);
        comparisons.push_back({{"dataset", ds},
                               {"regressor", to_string(kind)},
                               {"S", s},
                               {"native_mean", format_double(c.native_mean)},
                               {"augmented_mean", format_double(c.augmented_mean)},
                               {"t", format_double(c.test.t)},
                               {"p", format_double(c.test.p)},
                               {"verdict", to_string(c.verdict)}});
        if (s != s_table) continue;
        text << "  " << ds << " " << to_string(kind) << " S=" << s << ": native " << format_double(c.native_mean)
             << ", augmented " << format_double(c.augmented_mean) << ", t = " << format_double(c.test.t)
             << ", p = " << format_double(c.test.p) << " -> " << to_string(c.verdict) << '\n';
      }
    }
  }
  summary["comparisons"] = comparisons;

  text << '\n';
  std::vector<std::pair<RegressorKind, Arm>> native_methods, aug_methods, all_methods;
  std::vector<std::string> native_names, aug_names, all_names;
  for (auto kind : cfg.regressors) {
    native_methods.emplace_back(kind, Arm::native);
    native_names.push_back(to_string(kind));
    aug_methods.emplace_back(kind, Arm::augmented);
    aug_names.push_back(to_string(kind) + "+aug");
  }
  all_methods = native_methods;
  all_methods.insert(all_methods.end(), aug_methods.begin(), aug_methods.end());
  all_names = native_names;
  all_names.insert(all_names.end(), aug_names.begin(), aug_names.end());
  json panels = json::array();
  panels.push_back(friedman_panel(rep, cfg, native_names, native_methods, "native", text));
  panels.push_back(friedman_panel(rep, cfg, aug_names, aug_methods, "augmented", text));
  panels.push_back(friedman_panel(rep, cfg, all_names, all_methods, "all", text));
  summary["friedman"] = panels;

  for (const auto& ds : names) {
    for (auto kind : cfg.regressors) {
      emit_s_curve(rep, ds, kind, cfg.s_values, cfg.folds, out / ("s_curve_" + ds + "_" + to_string(kind) + ".svg"));
    }
  }
  write_file_atomic(out / "summary.txt", text.str());
  write_file_atomic(out / "summary.json", summary.dump(1) + "\n");
  std::cout << text.str();
}

void cmd_augment(const AugmentCommand& cmd) {
  if (cmd.out.empty()) throw ConfigError("augment: --out is required");
  if (cmd.schema.empty()) throw ConfigError("augment: --schema is required");
  if (!fs::exists(cmd.schema)) throw ConfigError("schema file not found: " + cmd.schema.string());
  const Schema schema = Schema::load(cmd.schema);

  ModelBundle bundle;
  if (!cmd.model.empty()) {
    if (!fs::exists(cmd.model)) throw ConfigError("model file not found: " + cmd.model.string());
    bundle = load_bundle(cmd.model);
  } else {
    if (cmd.train.empty()) throw ConfigError("augment: give --train or --model");
    if (!fs::exists(cmd.train)) throw ConfigError("training file not found: " + cmd.train.string());
    if (cmd.s < 1) throw ConfigError("augment: --s must be >= 1");
    const Dataset train = drop_missing_rows(load_csv(cmd.train, schema));
    bundle.stats = fit_preprocess(train);
    const Preprocessed p = apply_preprocess(train, bundle.stats);
    AugmentOptions opt;
    opt.s = cmd.s;
    opt.method = cmd.method;
    opt.encoding = cmd.encoding;
    opt.n_trees = cmd.n_trees;
    opt.seed = cmd.seed;
    opt.threads = cmd.threads;
    bundle.model = fit_augmenter(p.data.features(), p.data.target, opt);
  }
  if (!cmd.save_model.empty()) save_bundle(cmd.save_model, bundle);

  const fs::path input = cmd.input.empty() ? cmd.train : cmd.input;
  if (input.empty()) throw ConfigError("augment: give --input when loading a model");
  if (!fs::exists(input)) throw ConfigError("input file not found: " + input.string());
  const Dataset raw = dataset_from_csv(read_csv(input), schema, input.stem().string(), false);
  if (raw.d() != bundle.stats.columns.size()) {
    throw Error("width mismatch: input has " + std::to_string(raw.d()) + " feature columns, model expects " +
                std::to_string(bundle.stats.columns.size()));
  }
  for (std::size_t c = 0; c < raw.d(); ++c) {
    if (raw.feature_names[c] != bundle.stats.columns[c].name) {
      throw Error("column mismatch: input column '" + raw.feature_names[c] + "' where the model expects '" +
                  bundle.stats.columns[c].name + "'");
    }
  }
  const Preprocessed p = apply_preprocess(raw, bundle.stats);
  const Table X = p.data.features();
  if (X.cols() != bundle.model.input_dim()) {
    throw Error("width mismatch: " + std::to_string(X.cols()) + " preprocessed columns, model expects " +
                std::to_string(bundle.model.input_dim()));
  }
  const Table X2 = bundle.model.transform(X);
  std::vector<std::string> header = p.data.feature_names;
  for (std::size_t i = 1; i <= bundle.model.s(); ++i) header.push_back("p_le_" + std::to_string(i));
  CsvRows rows;
  rows.reserve(X2.rows());
  for (std::size_t r = 0; r < X2.rows(); ++r) {
    std::vector<std::string> line;
    line.reserve(X2.cols());
    for (double v : X2.row(r)) line.push_back(format_double(v));
    rows.push_back(std::move(line));
  }
  if (cmd.out.has_parent_path()) fs::create_directories(cmd.out.parent_path());
  write_csv(cmd.out, header, rows);
}

}  // namespace regaug
