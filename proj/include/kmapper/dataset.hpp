#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kmapper/error.hpp"

namespace kmapper {

// Declaration order is the DSM ordering: inputs, then internals, then outputs.
enum class Role { Input, Internal, Output };

constexpr std::string_view to_string(Role role) {
  switch (role) {
    case Role::Input: return "input";
    case Role::Internal: return "internal";
    case Role::Output: return "output";
  }
  return "internal";
}

inline Role parse_role(std::string_view text) {
  if (text == "input") return Role::Input;
  if (text == "output") return Role::Output;
  if (text == "internal") return Role::Internal;
  throw Error(ErrorKind::InvalidConfig, "unknown role '" + std::string(text) + "'");
}

/// Row slice of a parent table. Absent on tables that are not proper windows.
struct WindowOrigin {
  std::size_t start = 0;
  std::size_t size = 0;
  bool operator==(const WindowOrigin&) const = default;
};

/// Named numeric variables sampled at ordered time points. Immutable once
/// built; the constructor enforces every structural invariant.
class TimeSeriesTable {
 public:
  using Cell = std::optional<double>;
  using Row = std::vector<Cell>;

  TimeSeriesTable(std::vector<std::string> variables, std::vector<std::string> time_labels,
                  std::vector<Row> rows, std::map<std::string, Role> roles = {},
                  std::string time_column = "time")
      : variables_(std::move(variables)),
        time_labels_(std::move(time_labels)),
        rows_(std::move(rows)),
        time_column_(std::move(time_column)) {
    if (variables_.empty()) throw Error(ErrorKind::EmptyTable, "table has no variables");
    std::set<std::string> seen;
    for (const auto& name : variables_) {
      if (name.empty()) throw Error(ErrorKind::InvalidVariableName, "empty variable name");
      if (!seen.insert(name).second) throw Error(ErrorKind::DuplicateVariable, "'" + name + "'");
    }
    if (rows_.size() != time_labels_.size())
      throw Error(ErrorKind::RaggedRow, "row count differs from time label count");
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (rows_[r].size() != variables_.size())
        throw Error(ErrorKind::RaggedRow, "row " + std::to_string(r) + " has " +
                                              std::to_string(rows_[r].size()) + " cells, expected " +
                                              std::to_string(variables_.size()));
    }
    set_roles(std::move(roles));
  }

  const std::vector<std::string>& variables() const noexcept { return variables_; }
  const std::vector<std::string>& time_labels() const noexcept { return time_labels_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  const std::string& time_column() const noexcept { return time_column_; }
  const std::map<std::string, Role>& roles() const noexcept { return roles_; }
  const std::optional<WindowOrigin>& origin() const noexcept { return origin_; }

  std::size_t length() const noexcept { return rows_.size(); }
  std::size_t width() const noexcept { return variables_.size(); }

  const Cell& at(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - variables_.begin());
  }

  std::size_t index_of(std::string_view name) const {
    if (auto idx = find(name)) return *idx;
    throw Error(ErrorKind::UnknownVariable, "'" + std::string(name) + "'");
  }

  std::vector<Cell> column(std::size_t col) const {
    std::vector<Cell> out;
    out.reserve(rows_.size());
    for (const auto& row : rows_) out.push_back(row.at(col));
    return out;
  }

  std::vector<Cell> column(std::string_view name) const { return column(index_of(name)); }

  Role role(std::string_view name) const {
    auto it = roles_.find(std::string(name));
    return it == roles_.end() ? Role::Internal : it->second;
  }

  TimeSeriesTable with_roles(std::map<std::string, Role> roles) const {
    TimeSeriesTable copy = *this;
    copy.set_roles(std::move(roles));
    return copy;
  }

  TimeSeriesTable with_origin(std::optional<WindowOrigin> origin) const {
    TimeSeriesTable copy = *this;
    copy.origin_ = origin;
    return copy;
  }

  bool operator==(const TimeSeriesTable&) const = default;

 private:
  void set_roles(std::map<std::string, Role> roles) {
    for (const auto& [name, role] : roles) {
      if (!find(name)) throw Error(ErrorKind::UnknownVariable, "role for '" + name + "'");
    }
    // Internal is the default; storing it explicitly would break equality.
    std::erase_if(roles, [](const auto& kv) { return kv.second == Role::Internal; });
    roles_ = std::move(roles);
  }

  std::vector<std::string> variables_;
  std::vector<std::string> time_labels_;
  std::vector<Row> rows_;
  std::string time_column_;
  std::map<std::string, Role> roles_;
  std::optional<WindowOrigin> origin_;
};

struct WindowSpec {
  std::size_t size = 3;
  std::size_t stride = 1;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

// Comma-separated fields; a field wrapped in double quotes may contain commas
// and "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::optional<double> parse_real(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

inline std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Parses CSV text: header "time,var1,var2,...", then one row per time point.
/// Empty cells are missing values. Blank lines are skipped.
inline TimeSeriesTable load_table(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  bool have_header = false;
  std::vector<std::string> labels;
  std::vector<TimeSeriesTable::Row> rows;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (detail::trim(view).empty()) continue;
    auto fields = detail::split_csv_line(view);
    if (!have_header) {
      for (auto& f : fields) f = std::string(detail::trim(f));
      header = std::move(fields);
      have_header = true;
      if (header.size() < 2) throw Error(ErrorKind::EmptyTable, "header declares no variables");
      std::set<std::string> seen;
      for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].empty())
          throw Error(ErrorKind::InvalidVariableName, "empty name in header column " + std::to_string(c + 1));
        if (!seen.insert(header[c]).second)
          throw Error(ErrorKind::DuplicateVariable, "'" + header[c] + "' repeated in header");
      }
      continue;
    }
    if (fields.size() != header.size())
      throw Error(ErrorKind::RaggedRow, "line " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) + " cells, header has " +
                                            std::to_string(header.size()));
    labels.emplace_back(detail::trim(fields[0]));
    TimeSeriesTable::Row row;
    row.reserve(header.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      auto cell = detail::trim(fields[c]);
      if (cell.empty()) {
        row.emplace_back(std::nullopt);
        continue;
      }
      auto value = detail::parse_real(cell);
      if (!value)
        throw Error(ErrorKind::NonNumericCell, "line " + std::to_string(line_no) + ", column " +
                                                   std::to_string(c + 1) + " ('" + header[c] + "'): '" +
                                                   std::string(cell) + "'");
      row.emplace_back(*value);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorKind::EmptyTable, "no header row");
  if (rows.empty()) throw Error(ErrorKind::EmptyTable, "no data rows");

  std::string time_column = header.front();
  std::vector<std::string> variables(header.begin() + 1, header.end());
  return TimeSeriesTable(std::move(variables), std::move(labels), std::move(rows), {},
                         std::move(time_column));
}

inline TimeSeriesTable load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return load_table(in);
}

/// Writes the table back as CSV; values use 17 significant digits so a reload
/// reproduces them exactly.
inline void write_table(std::ostream& out, const TimeSeriesTable& table) {
  out << detail::quote_if_needed(table.time_column());
  for (const auto& v : table.variables()) out << ',' << detail::quote_if_needed(v);
  out << '\n';
  for (std::size_t r = 0; r < table.length(); ++r) {
    out << detail::quote_if_needed(table.time_labels()[r]);
    for (const auto& cell : table.rows()[r]) {
      out << ',';
      if (cell) out << detail::format_real(*cell);
    }
    out << '\n';
  }
}

/// Flat `key=value` lines; blank lines and lines starting with '#' are ignored.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = detail::trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::InvalidConfig, "line " + std::to_string(line_no) + ": expected key=value");
    out.emplace_back(std::string(detail::trim(view.substr(0, eq))),
                     std::string(detail::trim(view.substr(eq + 1))));
  }
  return out;
}

/// Extracts `role.<variable>=input|output|internal` entries; other keys are ignored.
inline std::map<std::string, Role> roles_from_config(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::map<std::string, Role> roles;
  for (const auto& [key, value] : entries) {
    if (!key.starts_with("role.")) continue;
    auto name = key.substr(5);
    if (name.empty()) throw Error(ErrorKind::InvalidConfig, "role key without variable name");
    roles[name] = parse_role(value);
  }
  return roles;
}

inline std::map<std::string, Role> load_roles(std::istream& in) {
  return roles_from_config(parse_key_values(in));
}

inline TimeSeriesTable select_window(const TimeSeriesTable& table, std::size_t start, std::size_t size) {
  if (size < 3) throw Error(ErrorKind::WindowTooSmall, "window size " + std::to_string(size) + " < 3");
  if (start > table.length() || size > table.length() - start)
    throw Error(ErrorKind::OutOfRange, "window [" + std::to_string(start) + ", " +
                                           std::to_string(start + size) + ") exceeds table length " +
                                           std::to_string(table.length()));
  if (start == 0 && size == table.length()) return table;

  std::vector<std::string> labels(table.time_labels().begin() + start,
                                  table.time_labels().begin() + start + size);
  std::vector<TimeSeriesTable::Row> rows(table.rows().begin() + start, table.rows().begin() + start + size);
  TimeSeriesTable out(table.variables(), std::move(labels), std::move(rows), table.roles(), table.time_column());
  std::size_t base = table.origin() ? table.origin()->start : 0;
  return out.with_origin(WindowOrigin{base + start, size});
}

inline std::size_t window_count(std::size_t length, const WindowSpec& spec) {
  if (spec.size < 3) throw Error(ErrorKind::WindowTooSmall, "window size " + std::to_string(spec.size) + " < 3");
  if (spec.stride < 1) throw Error(ErrorKind::InvalidConfig, "stride must be >= 1");
  if (spec.size > length)
    throw Error(ErrorKind::SpecExceedsTable, "window size " + std::to_string(spec.size) +
                                                 " exceeds table length " + std::to_string(length));
  return (length - spec.size) / spec.stride + 1;
}

inline std::vector<TimeSeriesTable> sliding_windows(const TimeSeriesTable& table, const WindowSpec& spec) {
  const std::size_t count = window_count(table.length(), spec);
  std::vector<TimeSeriesTable> windows;
  windows.reserve(count);
  for (std::size_t i = 0; i < count; ++i) windows.push_back(select_window(table, i * spec.stride, spec.size));
  return windows;
}

}  // namespace kmapper
