// Copyright 2026 The cricket_sort Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV inputs for the experiment analytics.
//
//   confusion:  header "tm_pm,tm_pf,tf_pm,tf_pf" plus one row, or a bare
//               2x2 grid (rows true male/female, columns sorted male/female)
//   arrivals:   header "time_min,sex"
//   speeds:     header "id,sex,time_s,classified" (an extra "speed_mm_s"
//               column with the tabulated speed is kept for comparison)
//
// Columns may appear in any order; extra columns are ignored.

#pragma once

#include <cctype>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cricket_sort/annotation_io.hpp"
#include "cricket_sort/errors.hpp"
#include "cricket_sort/metrics.hpp"

namespace cricket_sort {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

inline std::vector<CsvRow> read_csv_rows(std::string_view text) {
  std::vector<CsvRow> rows;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line;
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    CsvRow row{line, {}};
    std::size_t start = 0;
    while (true) {
      std::size_t comma = raw.find(',', start);
      std::string_view cell = raw.substr(start, comma == std::string_view::npos ? raw.size() - start
                                                                                : comma - start);
      auto first = cell.find_first_not_of(" \t\r\"");
      auto last = cell.find_last_not_of(" \t\r\"");
      row.cells.emplace_back(first == std::string_view::npos
                                 ? std::string_view{}
                                 : cell.substr(first, last - first + 1));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Header row mapped to column positions.
class CsvTable {
 public:
  CsvTable(std::string_view text, std::initializer_list<std::string_view> required) {
    auto rows = read_csv_rows(text);
    if (rows.empty()) throw FormatError("empty CSV: missing header");
    for (std::size_t i = 0; i < rows[0].cells.size(); ++i) {
      std::string name = rows[0].cells[i];
      for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      columns_[name] = i;
    }
    std::string missing;
    for (auto r : required) {
      if (!columns_.count(std::string(r))) {
        if (!missing.empty()) missing += ", ";
        missing += r;
      }
    }
    if (!missing.empty()) throw FormatError("missing columns: " + missing, rows[0].line);
    rows_.assign(rows.begin() + 1, rows.end());
  }

  const std::vector<CsvRow>& rows() const { return rows_; }
  bool has(std::string_view column) const { return columns_.count(std::string(column)) > 0; }

  const std::string& cell(const CsvRow& row, std::string_view column) const {
    const std::size_t idx = columns_.at(std::string(column));
    if (idx >= row.cells.size()) {
      throw FormatError("missing value for column '" + std::string(column) + "'", row.line);
    }
    return row.cells[idx];
  }

  double number(const CsvRow& row, std::string_view column) const {
    double v = 0.0;
    const auto& c = cell(row, column);
    if (!detail::parse_number(std::string_view(c), v)) {
      throw FormatError("column '" + std::string(column) + "': not a number '" + c + "'", row.line);
    }
    return v;
  }

  std::int64_t integer(const CsvRow& row, std::string_view column) const {
    std::int64_t v = 0;
    const auto& c = cell(row, column);
    if (!detail::parse_number(std::string_view(c), v)) {
      throw FormatError("column '" + std::string(column) + "': not an integer '" + c + "'",
                        row.line);
    }
    return v;
  }

  SexLabel sex(const CsvRow& row, std::string_view column) const {
    const auto& c = cell(row, column);
    auto label = parse_sex(c);
    if (!label) {
      throw FormatError("column '" + std::string(column) + "': unknown sex '" + c + "'", row.line);
    }
    return *label;
  }

 private:
  std::map<std::string, std::size_t> columns_;
  std::vector<CsvRow> rows_;
};

namespace detail {
inline bool has_alpha(const CsvRow& row) {
  for (const auto& c : row.cells) {
    for (char ch : c) {
      if (std::isalpha(static_cast<unsigned char>(ch))) return true;
    }
  }
  return false;
}
}  // namespace detail

inline SortConfusion parse_confusion_csv(std::string_view text) {
  auto rows = read_csv_rows(text);
  if (rows.empty()) throw FormatError("empty confusion CSV");
  SortConfusion c;
  auto non_negative = [](std::int64_t v, std::size_t line) {
    if (v < 0) throw FormatError("confusion counts must be non-negative", line);
    return v;
  };
  if (detail::has_alpha(rows[0])) {
    CsvTable table(text, {"tm_pm", "tm_pf", "tf_pm", "tf_pf"});
    if (table.rows().size() != 1) {
      throw FormatError("confusion CSV must have exactly one data row");
    }
    const auto& r = table.rows()[0];
    c.tm_pm = non_negative(table.integer(r, "tm_pm"), r.line);
    c.tm_pf = non_negative(table.integer(r, "tm_pf"), r.line);
    c.tf_pm = non_negative(table.integer(r, "tf_pm"), r.line);
    c.tf_pf = non_negative(table.integer(r, "tf_pf"), r.line);
    return c;
  }
  if (rows.size() != 2 || rows[0].cells.size() != 2 || rows[1].cells.size() != 2) {
    throw FormatError("confusion grid must be 2 rows of 2 counts");
  }
  std::int64_t v[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (!detail::parse_number(std::string_view(rows[i].cells[j]), v[i][j])) {
        throw FormatError("not an integer '" + rows[i].cells[j] + "'", rows[i].line);
      }
      non_negative(v[i][j], rows[i].line);
    }
  }
  return {v[0][0], v[0][1], v[1][0], v[1][1]};
}

inline std::string serialize_confusion_csv(const SortConfusion& c) {
  return "tm_pm,tm_pf,tf_pm,tf_pf\n" + std::to_string(c.tm_pm) + "," + std::to_string(c.tm_pf) +
         "," + std::to_string(c.tf_pm) + "," + std::to_string(c.tf_pf) + "\n";
}

inline std::vector<ArrivalEvent> parse_arrivals_csv(std::string_view text) {
  CsvTable table(text, {"time_min", "sex"});
  std::vector<ArrivalEvent> events;
  for (const auto& r : table.rows()) {
    events.push_back({table.number(r, "time_min"), table.sex(r, "sex")});
  }
  return events;
}

inline std::string serialize_arrivals_csv(std::span<const ArrivalEvent> events) {
  std::string out = "time_min,sex\n";
  for (const auto& e : events) {
    out += detail::format_number(e.time_min) + "," + std::string(to_string(e.sex)) + "\n";
  }
  return out;
}

struct SpeedRow {
  SpeedRecord record;
  std::optional<double> tabulated_speed_mm_s;
};

inline std::vector<SpeedRow> parse_speeds_csv(std::string_view text,
                                              double zone_length_mm = kZoneLengthMm) {
  CsvTable table(text, {"id", "sex", "time_s", "classified"});
  const bool has_speed = table.has("speed_mm_s");
  std::vector<SpeedRow> rows;
  for (const auto& r : table.rows()) {
    SpeedRow row;
    row.record.id = static_cast<int>(table.integer(r, "id"));
    row.record.sex = table.sex(r, "sex");
    row.record.traversal_time_s = table.number(r, "time_s");
    row.record.classified_as = table.sex(r, "classified");
    if (!(row.record.traversal_time_s > 0.0)) {
      throw FormatError("time_s must be positive", r.line);
    }
    row.record.speed_mm_s = speed_from_traversal(row.record.traversal_time_s, zone_length_mm);
    if (has_speed) row.tabulated_speed_mm_s = table.number(r, "speed_mm_s");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cricket_sort
