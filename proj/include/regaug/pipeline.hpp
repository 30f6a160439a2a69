#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "regaug/discretize.hpp"
#include "regaug/eval.hpp"
#include "regaug/regressor.hpp"

namespace regaug {

struct DatasetEntry {
  std::string name;
  std::filesystem::path csv;
  std::filesystem::path schema;
};

/// Experiment description read from a JSON file. Relative paths resolve
/// against the directory holding the config file.
struct ExperimentConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<RegressorKind> regressors;
  std::vector<std::size_t> s_values = {1, 2, 4, 8, 16, 32};
  /// S used for win/tie/loss and the rank diagrams; 0 means max(s_values).
  std::size_t table_s = 0;
  Discretization discretization = Discretization::equal_frequency;
  ClassEncoding encoding = ClassEncoding::binary_per_threshold;
  std::uint64_t seed = 42;
  std::size_t folds = 10;
  std::size_t n_trees = 100;
  std::size_t threads = 1;
  std::filesystem::path output_dir = "regaug-out";
  GridSearchSpec grid = GridSearchSpec::defaults();

  static ExperimentConfig parse(std::string_view json_text, const std::filesystem::path& base_dir = {});
  /// Reads the file; REGAUG_OUTPUT_DIR, when set, replaces output_dir.
  static ExperimentConfig load(const std::filesystem::path& path);
  void validate() const;
  std::size_t report_s() const;
};

inline constexpr const char* kOutputDirEnv = "REGAUG_OUTPUT_DIR";

std::filesystem::path prep_dir(const ExperimentConfig& cfg, const std::string& dataset);
std::filesystem::path fold_dir(const ExperimentConfig& cfg, const std::string& dataset, std::size_t fold);
std::filesystem::path cells_csv_path(const ExperimentConfig& cfg);
std::filesystem::path report_dir(const ExperimentConfig& cfg);

/// Seeds shared by both arms of a (dataset, fold).
std::uint64_t fold_plan_seed(std::uint64_t master, const std::string& dataset);
std::uint64_t regressor_seed(std::uint64_t master, const std::string& dataset, std::size_t fold, RegressorKind kind);
std::uint64_t augmenter_seed(std::uint64_t master, const std::string& dataset, std::size_t fold, std::size_t s);

/// Per-fold preprocessed train/test CSVs plus manifest.json for each dataset.
void cmd_prep(const ExperimentConfig& cfg);

struct RunSummary {
  std::size_t jobs = 0;
  std::size_t computed = 0;
  std::size_t resumed = 0;
  std::size_t cells = 0;
  std::size_t probabilities = 0;
  std::size_t off_grid_probabilities = 0;
};

/// Raised when some jobs failed; what() lists the failed cells.
class RunFailure : public Error {
 public:
  RunFailure(const std::string& msg, std::vector<std::string> failed) : Error(msg), failed_(std::move(failed)) {}
  const std::vector<std::string>& failed() const { return failed_; }

 private:
  std::vector<std::string> failed_;
};

/// Computes every (dataset, fold, arm, S, regressor) cell and writes cells.csv.
/// Work is grouped into jobs (one per native fold and one per augmented
/// (fold, S)) whose results are stored as files named by a content hash of
/// the config slice; with `resume` existing job files are reused.
RunSummary cmd_run(const ExperimentConfig& cfg, bool resume);

/// Reads cells.csv and writes report/summary.txt, report/summary.json, the
/// critical-difference diagrams and the RMSE-vs-S curves.
void cmd_report(const ExperimentConfig& cfg);

struct AugmentCommand {
  std::filesystem::path train;
  std::filesystem::path schema;
  std::filesystem::path out;
  std::filesystem::path input;       // defaults to train
  std::filesystem::path save_model;  // optional
  std::filesystem::path model;       // load instead of fitting
  std::size_t s = 32;
  std::size_t n_trees = 100;
  std::uint64_t seed = 42;
  Discretization method = Discretization::equal_frequency;
  ClassEncoding encoding = ClassEncoding::binary_per_threshold;
  std::size_t threads = 1;
};

/// Writes the preprocessed features of the input followed by columns
/// p_le_1..p_le_S.
void cmd_augment(const AugmentCommand& cmd);

}  // namespace regaug
