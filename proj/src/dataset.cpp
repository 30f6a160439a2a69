#include "regaug/dataset.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace regaug {

namespace fs = std::filesystem;

void Dataset::validate() const {
  if (column_kinds.size() != feature_names.size()) {
    throw Error("dataset '" + name + "': column_kinds size differs from feature count");
  }
  if (target.size() != rows.size()) {
    throw Error("dataset '" + name + "': target length differs from row count");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != feature_names.size()) {
      throw Error("dataset '" + name + "': row " + std::to_string(r) + " has " +
                  std::to_string(rows[r].size()) + " cells, expected " +
                  std::to_string(feature_names.size()));
    }
  }
}

bool Dataset::all_numeric() const {
  for (auto k : column_kinds) {
    if (k != ColumnKind::numeric) return false;
  }
  return true;
}

bool Dataset::has_missing() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (std::isnan(target[r])) return true;
    for (const auto& c : rows[r]) {
      if (is_missing(c)) return true;
    }
  }
  return false;
}

Table Dataset::features() const {
  if (!all_numeric()) throw Error("dataset '" + name + "': features() needs numeric columns");
  Table X(n(), d());
  for (std::size_t r = 0; r < n(); ++r) {
    for (std::size_t c = 0; c < d(); ++c) {
      const auto* v = std::get_if<double>(&rows[r][c]);
      if (v == nullptr) throw Error("dataset '" + name + "': missing or non-numeric cell");
      X(r, c) = *v;
    }
  }
  return X;
}

Dataset Dataset::subset(std::span<const std::size_t> idx) const {
  Dataset out;
  out.name = name;
  out.feature_names = feature_names;
  out.column_kinds = column_kinds;
  out.rows.reserve(idx.size());
  out.target.reserve(idx.size());
  for (auto i : idx) {
    out.rows.push_back(rows[i]);
    out.target.push_back(target[i]);
  }
  return out;
}

Schema Schema::parse(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("target") || !j["target"].is_string()) {
    throw ConfigError("schema must be an object with a string 'target'");
  }
  Schema s;
  s.target = j["target"].get<std::string>();
  if (j.contains("columns")) {
    if (!j["columns"].is_object()) throw ConfigError("schema 'columns' must be an object");
    for (const auto& [col, role] : j["columns"].items()) {
      const auto r = role.is_string() ? role.get<std::string>() : std::string{};
      if (r == "numeric") {
        s.columns[col] = ColumnRole::numeric;
      } else if (r == "categorical") {
        s.columns[col] = ColumnRole::categorical;
      } else if (r == "drop") {
        s.columns[col] = ColumnRole::drop;
      } else {
        throw ConfigError("schema column '" + col + "': role must be numeric, categorical or drop");
      }
    }
  }
  return s;
}

Schema Schema::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

CsvRows parse_csv(std::string_view text) {
  CsvRows rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool row_has_content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_content || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        row_has_content = false;
        break;
      default:
        field += c;
        row_has_content = true;
    }
  }
  if (in_quotes) throw Error("CSV: unterminated quoted field");
  if (row_has_content || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

CsvRows read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open CSV file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  return parse_csv(text);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const CsvRows& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write CSV file: " + path.string());
  auto emit = [&out](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(r[i]);
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  if (!out) throw Error("write failed: " + path.string());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_numeric_cell(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
  try {
    const double v = parse_double(s);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const Error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

Dataset dataset_from_csv(const CsvRows& rows, const Schema& schema, std::string name, bool require_target) {
  if (rows.empty()) throw Error("CSV '" + name + "' has no header row");
  const auto& header = rows.front();

  std::set<std::string> seen;
  std::ptrdiff_t target_col = -1;
  struct Kept {
    std::size_t index;
    ColumnKind kind;
  };
  std::vector<Kept> kept;
  Dataset ds;
  ds.name = std::move(name);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string col{trim(header[c])};
    if (!seen.insert(col).second) throw ConfigError("CSV '" + ds.name + "': duplicate column '" + col + "'");
    if (col == schema.target) {
      target_col = static_cast<std::ptrdiff_t>(c);
      continue;
    }
    auto it = schema.columns.find(col);
    if (it == schema.columns.end()) {
      throw ConfigError("header/schema mismatch in '" + ds.name + "': column '" + col +
                        "' is not declared in the schema");
    }
    if (it->second == ColumnRole::drop) continue;
    const auto kind = it->second == ColumnRole::numeric ? ColumnKind::numeric : ColumnKind::categorical;
    kept.push_back({c, kind});
    ds.feature_names.push_back(col);
    ds.column_kinds.push_back(kind);
  }
  if (target_col < 0 && require_target) {
    throw ConfigError("target column '" + schema.target + "' is absent from '" + ds.name + "'");
  }
  for (const auto& [col, role] : schema.columns) {
    if (!seen.contains(col)) {
      throw ConfigError("header/schema mismatch in '" + ds.name + "': schema column '" + col +
                        "' is not in the header");
    }
  }

  ds.rows.reserve(rows.size() - 1);
  ds.target.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& line = rows[r];
    if (line.size() != header.size()) {
      throw Error("CSV '" + ds.name + "': line " + std::to_string(r + 1) + " has " +
                  std::to_string(line.size()) + " fields, header has " + std::to_string(header.size()));
    }
    std::vector<Cell> cells;
    cells.reserve(kept.size());
    for (const auto& k : kept) {
      const std::string_view raw = trim(line[k.index]);
      if (k.kind == ColumnKind::numeric) {
        const double v = parse_numeric_cell(raw);
        cells.emplace_back(std::isnan(v) ? Cell{} : Cell{v});
      } else if (raw.empty() || raw == "?") {
        cells.emplace_back();
      } else {
        cells.emplace_back(std::string(raw));
      }
    }
    ds.rows.push_back(std::move(cells));
    ds.target.push_back(target_col < 0 ? std::numeric_limits<double>::quiet_NaN()
                                       : parse_numeric_cell(line[static_cast<std::size_t>(target_col)]));
  }
  return ds;
}

Dataset load_csv(const fs::path& path, const Schema& schema) {
  if (!fs::exists(path)) throw Error("CSV file not found: " + path.string());
  return dataset_from_csv(read_csv(path), schema, path.stem().string());
}

Dataset drop_missing_rows(const Dataset& ds) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < ds.n(); ++r) {
    bool ok = !std::isnan(ds.target[r]);
    for (const auto& c : ds.rows[r]) ok = ok && !is_missing(c);
    if (ok) keep.push_back(r);
  }
  if (keep.empty() && ds.n() > 0) {
    throw Error("dataset '" + ds.name + "': every row has a missing cell");
  }
  return ds.subset(keep);
}

void write_numeric_dataset(const fs::path& path, const Dataset& ds, const std::string& target_name) {
  std::vector<std::string> header = ds.feature_names;
  header.push_back(target_name);
  const Table X = ds.features();
  CsvRows rows;
  rows.reserve(ds.n());
  for (std::size_t r = 0; r < ds.n(); ++r) {
    std::vector<std::string> line;
    line.reserve(ds.d() + 1);
    for (double v : X.row(r)) line.push_back(format_double(v));
    line.push_back(format_double(ds.target[r]));
    rows.push_back(std::move(line));
  }
  write_csv(path, header, rows);
}

Dataset read_numeric_dataset(const fs::path& path, std::string name) {
  const CsvRows rows = read_csv(path);
  if (rows.empty() || rows.front().empty()) throw Error("empty numeric dataset: " + path.string());
  Dataset ds;
  ds.name = name.empty() ? path.stem().string() : std::move(name);
  const auto& header = rows.front();
  ds.feature_names.assign(header.begin(), header.end() - 1);
  ds.column_kinds.assign(ds.feature_names.size(), ColumnKind::numeric);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) throw Error("ragged numeric dataset: " + path.string());
    std::vector<Cell> cells;
    cells.reserve(header.size() - 1);
    for (std::size_t c = 0; c + 1 < header.size(); ++c) cells.emplace_back(parse_double(rows[r][c]));
    ds.rows.push_back(std::move(cells));
    ds.target.push_back(parse_double(rows[r].back()));
  }
  return ds;
}

}  // namespace regaug
