#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "regaug/common.hpp"

namespace regaug {

enum class ColumnKind { numeric, categorical };

/// A table cell: missing, a number, or a category token.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

/// Column-typed feature table plus a numeric target. Rows are stored in input
/// order; a NaN target counts as a missing cell.
struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  std::vector<ColumnKind> column_kinds;
  std::vector<std::vector<Cell>> rows;
  std::vector<double> target;

  std::size_t n() const { return rows.size(); }
  std::size_t d() const { return feature_names.size(); }

  /// Throws if the shape invariants are broken.
  void validate() const;
  bool all_numeric() const;
  bool has_missing() const;
  /// Numeric design matrix. Requires all-numeric columns and no missing cells.
  Table features() const;
  Dataset subset(std::span<const std::size_t> idx) const;
};

enum class ColumnRole { numeric, categorical, drop };

/// Column declarations for a CSV file. Every header column must be declared,
/// except the target which is always numeric.
struct Schema {
  std::string target;
  std::map<std::string, ColumnRole> columns;

  static Schema load(const std::filesystem::path& path);
  static Schema parse(std::string_view json_text);
};

using CsvRows = std::vector<std::vector<std::string>>;

/// Reads comma-separated text with optional double-quoted fields.
CsvRows read_csv(const std::filesystem::path& path);
CsvRows parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const CsvRows& rows);

Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
/// With require_target false a missing target column yields NaN targets.
Dataset dataset_from_csv(const CsvRows& rows, const Schema& schema, std::string name,
                         bool require_target = true);

/// Keeps rows with no missing cell (features or target), in original order.
Dataset drop_missing_rows(const Dataset& ds);

/// Writes an all-numeric dataset as CSV with the target in the last column.
void write_numeric_dataset(const std::filesystem::path& path, const Dataset& ds,
                           const std::string& target_name = "target");
/// Reads a CSV written by write_numeric_dataset.
Dataset read_numeric_dataset(const std::filesystem::path& path, std::string name = {});

}  // namespace regaug
