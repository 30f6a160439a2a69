#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "regaug/eval.hpp"

namespace regaug {

/// Index ranges [first, last] (in ascending-rank order) of maximal groups whose
/// rank spread is below `cd`. Single-member groups are not reported.
std::vector<std::pair<std::size_t, std::size_t>> cd_cliques(std::vector<double> sorted_ranks, double cd);

/// Critical-difference diagram: mean-rank axis, one marker per method, and a
/// bar under each group of methods that are not significantly different.
std::string cd_diagram_svg(const std::vector<std::string>& names, const std::vector<double>& mean_ranks, double cd,
                           const std::string& title = {});
void emit_cd_diagram(const std::vector<std::string>& names, const std::vector<double>& mean_ranks, double cd,
                     const std::filesystem::path& out_path, const std::string& title = {});

struct SCurve {
  std::vector<std::size_t> s_values;
  std::vector<double> augmented_test;
  std::vector<double> augmented_train;
  double native_test = 0.0;
  double native_train = 0.0;
};

/// Fold-mean RMSEs per S for one (dataset, regressor). Throws on missing cells.
SCurve s_curve_data(const ExperimentReport& report, const std::string& dataset, RegressorKind reg,
                    const std::vector<std::size_t>& s_values, std::size_t folds);

std::string s_curve_svg(const SCurve& curve, const std::string& title = {});
void emit_s_curve(const ExperimentReport& report, const std::string& dataset, RegressorKind reg,
                  const std::vector<std::size_t>& s_values, std::size_t folds, const std::filesystem::path& out_path);

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace regaug
