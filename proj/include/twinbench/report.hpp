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

// Report tables rendered as markdown for people and CSV for machines. Both
// renderings come from the same cell values: markdown rounds to 3 decimals,
// CSV keeps 6.

#ifndef TWINBENCH_REPORT_HPP_
#define TWINBENCH_REPORT_HPP_

#include <optional>
#include <string>
#include <vector>

namespace twinbench {

struct Cell {
  double value = 0;  // NaN renders as "n/a"
  bool significant = false;  // markdown appends "*"
  bool best = false;         // markdown wraps in "**"
  // Markdown text override, e.g. "800.0%" or "--"; CSV still gets value.
  std::optional<std::string> text;
};

struct TableRow {
  std::string label;
  // Second label column (e.g. the model); empty when unused.
  std::string sublabel;
  std::vector<Cell> cells;
};

struct Table {
  std::string name;   // machine id used in CSV, e.g. "similarity"
  std::string title;  // markdown heading
  std::string label_header = "Condition";
  std::string sublabel_header;  // second label column when non-empty
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
  std::vector<std::string> notes;  // markdown only
};

struct Report {
  std::vector<Table> tables;
};

std::string format_fixed(double v, int decimals);  // "n/a" for NaN
std::string format_percent(double fraction);       // 8.0 -> "800.0%"

std::string render_markdown(const Report& r);
// Long format: table,row,sublabel,column,value,significant,best.
std::string render_csv(const Report& r);

// Marks the maximum finite value in every column as best.
void mark_column_max(Table& t);

}  // namespace twinbench

#endif  // TWINBENCH_REPORT_HPP_
