#pragma once

// Typed columnar tables: ingestion, missing-value handling, standardization,
// factor collapsing and per-category partitioning.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaselect/common.hpp"

namespace gaselect {

enum class ColumnKind { binary, factor, numeric };
enum class ColumnRole { predictor, outcome, category, ignore };

inline std::string_view to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::binary: return "binary";
    case ColumnKind::factor: return "factor";
    case ColumnKind::numeric: return "numeric";
  }
  return "?";
}

inline std::string_view to_string(ColumnRole r) {
  switch (r) {
    case ColumnRole::predictor: return "predictor";
    case ColumnRole::outcome: return "outcome";
    case ColumnRole::category: return "category";
    case ColumnRole::ignore: return "ignore";
  }
  return "?";
}

inline ColumnKind parse_column_kind(std::string_view s) {
  if (s == "binary") return ColumnKind::binary;
  if (s == "factor") return ColumnKind::factor;
  if (s == "numeric") return ColumnKind::numeric;
  throw DataError("unknown column kind '" + std::string(s) + "'");
}

inline ColumnRole parse_column_role(std::string_view s) {
  if (s == "predictor") return ColumnRole::predictor;
  if (s == "outcome") return ColumnRole::outcome;
  if (s == "category") return ColumnRole::category;
  if (s == "ignore") return ColumnRole::ignore;
  throw DataError("unknown column role '" + std::string(s) + "'");
}

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  /// Factor levels in declaration order; the first is the reference level.
  std::vector<std::string> levels;
  ColumnRole role = ColumnRole::predictor;
  /// When set, a factor value outside `levels` is a load error.
  bool closed_levels = false;

  bool operator==(const ColumnSpec&) const = default;
};

/// One column of cells. Binary and numeric columns use `values` (NaN marks a
/// missing cell); factor columns use `codes` into spec.levels (-1 = missing).
struct Column {
  ColumnSpec spec;
  std::vector<double> values;
  std::vector<int> codes;

  std::size_t size() const {
    return spec.kind == ColumnKind::factor ? codes.size() : values.size();
  }
  bool is_missing(std::size_t row) const {
    return spec.kind == ColumnKind::factor ? codes[row] < 0 : std::isnan(values[row]);
  }
  std::size_t missing_count() const {
    std::size_t n = 0;
    for (std::size_t r = 0; r < size(); ++r) n += is_missing(r) ? 1 : 0;
    return n;
  }
};

struct ScalingStats {
  double mean = 0.0;
  double sd = 1.0;
  bool operator==(const ScalingStats&) const = default;
};

/// A table of typed columns. Operations below never mutate their input; they
/// return a new Dataset.
struct Dataset {
  std::vector<Column> columns;
  std::map<std::string, ScalingStats> scaling_stats;

  std::size_t n_rows() const { return columns.empty() ? 0 : columns.front().size(); }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].spec.name == name) return i;
    return std::nullopt;
  }

  const Column& column(std::string_view name) const {
    auto i = find(name);
    if (!i) throw std::invalid_argument("no column named '" + std::string(name) + "'");
    return columns[*i];
  }

  std::optional<std::size_t> role_index(ColumnRole role) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].spec.role == role) return i;
    return std::nullopt;
  }

  std::size_t outcome_index() const {
    auto i = role_index(ColumnRole::outcome);
    if (!i) throw std::invalid_argument("dataset has no outcome column");
    return *i;
  }

  std::optional<std::size_t> category_index() const { return role_index(ColumnRole::category); }

  /// Column positions of predictors in schema order. Main effect k (1-based)
  /// of a VariableSpace built from this dataset is predictor_indices()[k-1].
  std::vector<std::size_t> predictor_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i].spec.role == ColumnRole::predictor) out.push_back(i);
    return out;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (const auto& c : columns)
      if (c.spec.role != ColumnRole::ignore) n += c.missing_count();
    return n;
  }

  Dataset select_rows(const std::vector<std::size_t>& rows) const {
    Dataset out;
    out.scaling_stats = scaling_stats;
    out.columns.reserve(columns.size());
    for (const auto& c : columns) {
      Column nc;
      nc.spec = c.spec;
      if (c.spec.kind == ColumnKind::factor) {
        nc.codes.reserve(rows.size());
        for (auto r : rows) nc.codes.push_back(c.codes[r]);
      } else {
        nc.values.reserve(rows.size());
        for (auto r : rows) nc.values.push_back(c.values[r]);
      }
      out.columns.push_back(std::move(nc));
    }
    return out;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Splits one delimited line. Double-quoted fields may contain the delimiter;
/// a doubled quote inside quotes is a literal quote.
inline std::vector<std::string> split_record(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delim) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void check_schema(const std::vector<ColumnSpec>& schema) {
  std::size_t outcomes = 0, categories = 0;
  std::set<std::string> names;
  for (const auto& s : schema) {
    if (!names.insert(s.name).second) throw DataError("duplicate column '" + s.name + "'");
    if (s.role == ColumnRole::outcome) {
      ++outcomes;
      if (s.kind != ColumnKind::binary) throw DataError("outcome '" + s.name + "' must be binary");
    }
    if (s.role == ColumnRole::category) {
      ++categories;
      if (s.kind != ColumnKind::factor)
        throw DataError("category column '" + s.name + "' must be a factor");
    }
    std::set<std::string> lv(s.levels.begin(), s.levels.end());
    if (lv.size() != s.levels.size()) throw DataError("duplicate levels in '" + s.name + "'");
  }
  if (outcomes != 1) throw DataError("schema must have exactly one outcome column");
  if (categories > 1) throw DataError("schema may have at most one category column");
}

}  // namespace detail

/// Reads a delimited file whose header row must list the schema names in
/// schema order. Cells equal to `missing_token` (after trimming) are marked
/// missing. Undeclared factor levels are appended in sorted order unless the
/// column's levels are closed.
inline Dataset load_csv(std::istream& in, const std::vector<ColumnSpec>& schema,
                        const std::string& missing_token = "", char delimiter = ',') {
  detail::check_schema(schema);
  const std::string_view token = detail::trim(missing_token);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: missing header row");
  auto header = detail::split_record(line, delimiter);
  if (header.size() != schema.size())
    throw DataError("header has " + std::to_string(header.size()) + " columns, schema has " +
                    std::to_string(schema.size()));
  for (std::size_t i = 0; i < header.size(); ++i)
    if (detail::trim(header[i]) != schema[i].name)
      throw DataError("header column " + std::to_string(i + 1) + " is '" +
                      std::string(detail::trim(header[i])) + "', schema expects '" +
                      schema[i].name + "'");

  std::vector<std::vector<std::string>> factor_text(schema.size());
  Dataset d;
  d.columns.resize(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) d.columns[i].spec = schema[i];

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_record(line, delimiter);
    if (cells.size() != schema.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(schema.size()) + " fields, found " +
                      std::to_string(cells.size()));
    for (std::size_t i = 0; i < schema.size(); ++i) {
      auto cell = detail::trim(cells[i]);
      bool missing = cell == token;
      auto& col = d.columns[i];
      switch (schema[i].kind) {
        case ColumnKind::factor:
          factor_text[i].emplace_back(missing ? std::string() : std::string(cell));
          col.codes.push_back(missing ? -1 : 0);
          break;
        case ColumnKind::binary:
        case ColumnKind::numeric: {
          if (missing) {
            col.values.push_back(std::numeric_limits<double>::quiet_NaN());
            break;
          }
          auto v = detail::parse_double(cell);
          if (!v || !std::isfinite(*v))
            throw DataError("line " + std::to_string(line_no) + ": cannot parse '" +
                            std::string(cell) + "' as " +
                            std::string(to_string(schema[i].kind)) + " for column '" +
                            schema[i].name + "'");
          if (schema[i].kind == ColumnKind::binary && *v != 0.0 && *v != 1.0)
            throw DataError("line " + std::to_string(line_no) + ": binary column '" +
                            schema[i].name + "' has value '" + std::string(cell) + "'");
          col.values.push_back(*v);
          break;
        }
      }
    }
  }

  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].kind != ColumnKind::factor) continue;
    auto& col = d.columns[i];
    auto& levels = col.spec.levels;
    std::set<std::string> extra;
    for (std::size_t r = 0; r < col.codes.size(); ++r) {
      if (col.codes[r] < 0) continue;
      const auto& v = factor_text[i][r];
      if (std::find(levels.begin(), levels.end(), v) == levels.end()) {
        if (col.spec.closed_levels)
          throw DataError("column '" + col.spec.name + "': unknown level '" + v + "'");
        extra.insert(v);
      }
    }
    levels.insert(levels.end(), extra.begin(), extra.end());
    std::map<std::string, int> code_of;
    for (std::size_t k = 0; k < levels.size(); ++k) code_of[levels[k]] = static_cast<int>(k);
    for (std::size_t r = 0; r < col.codes.size(); ++r)
      if (col.codes[r] >= 0) col.codes[r] = code_of.at(factor_text[i][r]);
  }
  return d;
}

inline Dataset load_csv(const std::string& path, const std::vector<ColumnSpec>& schema,
                        const std::string& missing_token = "", char delimiter = ',') {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return load_csv(in, schema, missing_token, delimiter);
}

inline std::string cell_text(const Column& c, std::size_t row, const std::string& missing_token) {
  if (c.is_missing(row)) return missing_token;
  if (c.spec.kind == ColumnKind::factor) return c.spec.levels[static_cast<std::size_t>(c.codes[row])];
  return detail::format_double(c.values[row]);
}

/// Writes the table in the format load_csv reads. Numbers use the shortest
/// representation that round-trips exactly.
inline void write_csv(std::ostream& out, const Dataset& d, const std::string& missing_token = "",
                      char delimiter = ',') {
  for (std::size_t i = 0; i < d.columns.size(); ++i)
    out << (i ? std::string(1, delimiter) : std::string()) << d.columns[i].spec.name;
  out << '\n';
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    for (std::size_t i = 0; i < d.columns.size(); ++i) {
      if (i) out << delimiter;
      out << cell_text(d.columns[i], r, missing_token);
    }
    out << '\n';
  }
}

inline void write_csv(const std::string& path, const Dataset& d,
                      const std::string& missing_token = "", char delimiter = ',') {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_csv(out, d, missing_token, delimiter);
}

/// Drops rows whose cell in `column` equals `value` (numeric comparison for
/// binary/numeric columns, exact trimmed text for factors). Missing cells
/// never match.
inline Dataset drop_rows_where(const Dataset& d, const std::string& column, const std::string& value) {
  const Column& c = d.column(column);
  std::vector<std::size_t> keep;
  std::optional<double> num;
  if (c.spec.kind != ColumnKind::factor) {
    num = detail::parse_double(value);
    if (!num) throw DataError("row filter value '" + value + "' is not numeric");
  }
  auto text = detail::trim(value);
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    bool match = false;
    if (!c.is_missing(r)) {
      match = c.spec.kind == ColumnKind::factor
                  ? c.spec.levels[static_cast<std::size_t>(c.codes[r])] == text
                  : c.values[r] == *num;
    }
    if (!match) keep.push_back(r);
  }
  return d.select_rows(keep);
}

/// Removes rows with a missing binary/factor cell (any role except ignore),
/// then replaces missing numeric cells by the mean of the surviving rows'
/// non-missing values. Ignored columns are not inspected.
inline Dataset handle_missing(const Dataset& d) {
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    bool complete = true;
    for (const auto& c : d.columns) {
      if (c.spec.role == ColumnRole::ignore || c.spec.kind == ColumnKind::numeric) continue;
      if (c.is_missing(r)) {
        complete = false;
        break;
      }
    }
    if (complete) keep.push_back(r);
  }
  Dataset out = d.select_rows(keep);
  for (auto& c : out.columns) {
    if (c.spec.role == ColumnRole::ignore || c.spec.kind != ColumnKind::numeric) continue;
    double sum = 0.0;
    std::size_t n = 0;
    for (double v : c.values)
      if (!std::isnan(v)) {
        sum += v;
        ++n;
      }
    if (n == c.values.size()) continue;
    if (n == 0) throw DataError("numeric column '" + c.spec.name + "' is entirely missing");
    const double mean = sum / static_cast<double>(n);
    for (double& v : c.values)
      if (std::isnan(v)) v = mean;
  }
  return out;
}

/// Scales every numeric predictor to sample mean 0 and sample (N-1) standard
/// deviation 1, recording the statistics used.
inline Dataset standardize(const Dataset& d) {
  Dataset out = d;
  for (auto& c : out.columns) {
    if (c.spec.role != ColumnRole::predictor || c.spec.kind != ColumnKind::numeric) continue;
    const std::size_t n = c.values.size();
    double mean = 0.0;
    for (double v : c.values) {
      if (std::isnan(v))
        throw std::invalid_argument("standardize: column '" + c.spec.name + "' has missing cells");
      mean += v;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : c.values) ss += (v - mean) * (v - mean);
    const double sd = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    if (!(sd > 0.0)) throw DataError("column '" + c.spec.name + "' has zero variance");
    for (double& v : c.values) v = (v - mean) / sd;
    out.scaling_stats[c.spec.name] = {mean, sd};
  }
  return out;
}

/// Inverse of standardize for the columns recorded in scaling_stats.
inline Dataset unstandardize(const Dataset& d) {
  Dataset out = d;
  for (auto& c : out.columns) {
    auto it = d.scaling_stats.find(c.spec.name);
    if (it == d.scaling_stats.end()) continue;
    for (double& v : c.values) v = v * it->second.sd + it->second.mean;
  }
  out.scaling_stats.clear();
  return out;
}

/// Relabels a factor through `mapping`. Every level observed in the data
/// must be mapped; the new level order follows the first appearance of each
/// target while walking the old level list.
inline Dataset collapse_factor(const Dataset& d, const std::string& column,
                               const std::map<std::string, std::string>& mapping) {
  auto idx = d.find(column);
  if (!idx) throw std::invalid_argument("collapse_factor: no column '" + column + "'");
  const Column& src = d.columns[*idx];
  if (src.spec.kind != ColumnKind::factor)
    throw std::invalid_argument("collapse_factor: column '" + column + "' is not a factor");

  std::vector<bool> observed(src.spec.levels.size(), false);
  for (int code : src.codes)
    if (code >= 0) observed[static_cast<std::size_t>(code)] = true;

  std::vector<std::string> new_levels;
  std::vector<int> remap(src.spec.levels.size(), -1);
  for (std::size_t k = 0; k < src.spec.levels.size(); ++k) {
    auto it = mapping.find(src.spec.levels[k]);
    if (it == mapping.end()) {
      if (observed[k])
        throw DataError("collapse mapping for '" + column + "' omits observed level '" +
                        src.spec.levels[k] + "'");
      continue;
    }
    auto pos = std::find(new_levels.begin(), new_levels.end(), it->second);
    if (pos == new_levels.end()) {
      new_levels.push_back(it->second);
      pos = std::prev(new_levels.end());
    }
    remap[k] = static_cast<int>(pos - new_levels.begin());
  }

  Dataset out = d;
  Column& dst = out.columns[*idx];
  dst.spec.levels = std::move(new_levels);
  for (int& code : dst.codes)
    if (code >= 0) code = remap[static_cast<std::size_t>(code)];
  return out;
}

/// Partitions rows by the category column's value; each subset drops the
/// category column. Subsets are ordered by label; levels with no rows are
/// skipped.
inline std::vector<std::pair<std::string, Dataset>> subset_by_category(const Dataset& d) {
  auto cat = d.category_index();
  if (!cat) throw std::invalid_argument("subset_by_category: dataset has no category column");
  const Column& c = d.columns[*cat];
  std::vector<std::vector<std::size_t>> rows(c.spec.levels.size());
  for (std::size_t r = 0; r < d.n_rows(); ++r)
    if (c.codes[r] >= 0) rows[static_cast<std::size_t>(c.codes[r])].push_back(r);

  std::vector<std::size_t> order(c.spec.levels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return c.spec.levels[a] < c.spec.levels[b]; });

  std::vector<std::pair<std::string, Dataset>> out;
  for (auto k : order) {
    if (rows[k].empty()) continue;
    Dataset sub = d.select_rows(rows[k]);
    sub.columns.erase(sub.columns.begin() + static_cast<std::ptrdiff_t>(*cat));
    out.emplace_back(c.spec.levels[k], std::move(sub));
  }
  return out;
}

}  // namespace gaselect
