// regaug: command-line driver for the threshold-augmentation experiments.

#include <iostream>

#include "CLI11.hpp"
#include "regaug/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 1;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-threshold feature augmentation for regression"};
  app.require_subcommand(1);

  std::string config_path;
  bool resume = false;

  auto* prep = app.add_subcommand("prep", "Split and preprocess every dataset into per-fold CSVs");
  prep->add_option("--config", config_path, "Experiment config (JSON)")->required();

  auto* run = app.add_subcommand("run", "Compute all native/augmented RMSE cells");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_flag("--resume", resume, "Reuse job results already on disk");

  auto* report = app.add_subcommand("report", "Significance tests, rank diagrams and S curves");
  report->add_option("--config", config_path, "Experiment config (JSON)")->required();

  regaug::AugmentCommand aug;
  std::string method = "equal_frequency";
  std::string encoding = "binary_per_threshold";
  auto* augment = app.add_subcommand("augment", "Append threshold probabilities to a CSV");
  augment->add_option("--train", aug.train, "Training CSV the classifiers are fitted on");
  augment->add_option("--schema", aug.schema, "Column schema (JSON)")->required();
  augment->add_option("--s", aug.s, "Number of thresholds");
  augment->add_option("--out", aug.out, "Output CSV")->required();
  augment->add_option("--input", aug.input, "CSV to transform (default: the training CSV)");
  augment->add_option("--save-model", aug.save_model, "Write the fitted model here");
  augment->add_option("--model", aug.model, "Load a saved model instead of fitting");
  augment->add_option("--trees", aug.n_trees, "Trees per threshold forest");
  augment->add_option("--seed", aug.seed, "Master seed");
  augment->add_option("--method", method, "equal_frequency or equal_width");
  augment->add_option("--encoding", encoding, "binary_per_threshold or multiclass_interval");
  augment->add_option("--threads", aug.threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*augment) {
      aug.method = regaug::parse_discretization(method);
      aug.encoding = regaug::parse_encoding(encoding);
      regaug::cmd_augment(aug);
      return 0;
    }
    const auto cfg = regaug::ExperimentConfig::load(config_path);
    if (*prep) regaug::cmd_prep(cfg);
    if (*run) regaug::cmd_run(cfg, resume);
    if (*report) regaug::cmd_report(cfg);
  } catch (const regaug::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
