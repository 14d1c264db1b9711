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

// RFC 4180 reading and writing.

#ifndef TWINBENCH_CSV_HPP_
#define TWINBENCH_CSV_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace twinbench {

using CsvRow = std::vector<std::string>;

// Quoted fields may contain commas, doubled quotes and line breaks. CRLF and
// LF both end records; a trailing line break does not add an empty record.
// Throws Error(kMalformedValue) on an unterminated quote.
std::vector<CsvRow> parse_csv(std::string_view text);

// Whole file; throws Error(kUnreadableFile).
std::vector<CsvRow> read_csv_file(const std::filesystem::path& path);

// Quotes only when needed.
std::string csv_field(std::string_view field);
std::string csv_line(const CsvRow& row);  // with trailing "\n"

std::string read_text_file(const std::filesystem::path& path);
// Writes via a temporary file and rename.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace twinbench

#endif  // TWINBENCH_CSV_HPP_
