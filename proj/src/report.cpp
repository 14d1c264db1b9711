// Copyright 2026 The twinbench Authors.
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

#include "twinbench/report.hpp"

#include <fmt/format.h>

#include <cmath>

#include "twinbench/csv.hpp"

namespace twinbench {

std::string format_fixed(double v, int decimals) {
  if (std::isnan(v)) return "n/a";
  std::string s = fmt::format("{:.{}f}", v, decimals);
  // Avoid "-0.000" for tiny negatives.
  if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_percent(double fraction) {
  if (std::isnan(fraction)) return "n/a";
  return format_fixed(fraction * 100.0, 1) + "%";
}

namespace {

std::string md_cell(const Cell& c) {
  std::string s = c.text ? *c.text : format_fixed(c.value, 3);
  if (c.significant) s += "*";
  if (c.best) s = "**" + s + "**";
  return s;
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out.push_back(c);
  }
  return out;
}

}  // namespace

std::string render_markdown(const Report& r) {
  std::string out;
  for (size_t t = 0; t < r.tables.size(); ++t) {
    const Table& tb = r.tables[t];
    if (t > 0) out += "\n";
    out += "## " + tb.title + "\n\n";
    std::vector<std::string> head = {tb.label_header};
    if (!tb.sublabel_header.empty()) head.push_back(tb.sublabel_header);
    head.insert(head.end(), tb.columns.begin(), tb.columns.end());
    out += "|";
    for (const auto& h : head) out += " " + md_escape(h) + " |";
    out += "\n|";
    for (size_t i = 0; i < head.size(); ++i) out += i < (tb.sublabel_header.empty() ? 1u : 2u) ? "---|" : "---:|";
    out += "\n";
    for (const auto& row : tb.rows) {
      out += "| " + md_escape(row.label) + " |";
      if (!tb.sublabel_header.empty()) out += " " + md_escape(row.sublabel) + " |";
      for (const auto& c : row.cells) out += " " + md_cell(c) + " |";
      out += "\n";
    }
    if (!tb.notes.empty()) {
      out += "\n";
      for (const auto& n : tb.notes) out += md_escape(n) + "\n";
    }
  }
  return out;
}

std::string render_csv(const Report& r) {
  std::string out = csv_line({"table", "row", "sublabel", "column", "value", "significant", "best"});
  for (const auto& tb : r.tables) {
    for (const auto& row : tb.rows) {
      for (size_t c = 0; c < row.cells.size() && c < tb.columns.size(); ++c) {
        const Cell& cell = row.cells[c];
        out += csv_line({tb.name, row.label, row.sublabel, tb.columns[c], format_fixed(cell.value, 6),
                         cell.significant ? "1" : "0", cell.best ? "1" : "0"});
      }
    }
  }
  return out;
}

void mark_column_max(Table& t) {
  for (size_t c = 0; c < t.columns.size(); ++c) {
    double best = -INFINITY;
    for (const auto& row : t.rows) {
      if (c < row.cells.size() && std::isfinite(row.cells[c].value)) best = std::max(best, row.cells[c].value);
    }
    if (!std::isfinite(best)) continue;
    for (auto& row : t.rows) {
      // Ties at the displayed precision are all bold.
      if (c < row.cells.size() && std::isfinite(row.cells[c].value) &&
          format_fixed(row.cells[c].value, 3) == format_fixed(best, 3)) {
        row.cells[c].best = true;
      }
    }
  }
}

}  // namespace twinbench
