#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "regaug/common.hpp"
#include "regaug/dataset.hpp"

namespace testutil {

namespace fs = std::filesystem;

inline fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("regaug_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// n x d uniform(0,1) features from a fixed seed.
inline regaug::Table uniform_table(std::size_t n, std::size_t d, std::uint64_t seed) {
  regaug::Rng rng(seed);
  regaug::Table X(n, d);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < d; ++c) X(r, c) = rng.uniform();
  }
  return X;
}

/// All-numeric dataset from a table and target.
inline regaug::Dataset numeric_dataset(const regaug::Table& X, const std::vector<double>& y,
                                       const std::string& name = "synthetic") {
  regaug::Dataset ds;
  ds.name = name;
  for (std::size_t c = 0; c < X.cols(); ++c) {
    ds.feature_names.push_back("x" + std::to_string(c + 1));
    ds.column_kinds.push_back(regaug::ColumnKind::numeric);
  }
  for (std::size_t r = 0; r < X.rows(); ++r) {
    std::vector<regaug::Cell> row;
    for (double v : X.row(r)) row.emplace_back(v);
    ds.rows.push_back(std::move(row));
  }
  ds.target = y;
  return ds;
}

/// Writes X and y as CSV (columns x1..xd, y) plus a matching schema.
inline void write_numeric_csv(const fs::path& csv, const fs::path& schema, const regaug::Table& X,
                              const std::vector<double>& y) {
  std::string text;
  std::string cols;
  for (std::size_t c = 0; c < X.cols(); ++c) {
    text += "x" + std::to_string(c + 1) + ",";
    cols += (c ? "," : "") + std::string("\"x") + std::to_string(c + 1) + "\":\"numeric\"";
  }
  text += "y\n";
  for (std::size_t r = 0; r < X.rows(); ++r) {
    for (double v : X.row(r)) text += regaug::format_double(v) + ",";
    text += regaug::format_double(y[r]) + "\n";
  }
  write_text(csv, text);
  write_text(schema, "{\"target\":\"y\",\"columns\":{" + cols + "}}");
}

}  // namespace testutil
