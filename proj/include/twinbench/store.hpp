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

// Corpus ingestion and the on-disk run layout:
//
//   <root>/runs/<run_id>/manifest.json
//   <root>/runs/<run_id>/generations.jsonl
//   <root>/runs/<run_id>/evaluations.jsonl

#ifndef TWINBENCH_STORE_HPP_
#define TWINBENCH_STORE_HPP_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "twinbench/condition.hpp"
#include "twinbench/error.hpp"
#include "twinbench/llm_gateway.hpp"
#include "twinbench/persona.hpp"

namespace twinbench {

enum class DataFormat { kCsv, kJsonl };

DataFormat parse_format(std::string_view s);  // "csv" / "jsonl"
std::string_view format_name(DataFormat f);
// From the file extension; throws kInvalidArgument when it is neither.
DataFormat format_from_path(const std::filesystem::path& p);

struct RejectedRow {
  size_t row = 0;  // 1-based data row (header excluded)
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
};

struct CorpusSummary {
  size_t input_rows = 0;
  size_t accepted = 0;
  std::vector<RejectedRow> rejects;
  std::map<std::string, size_t> rejects_by_class;
  std::vector<std::string> ignored_columns;
  std::string corpus_hash;  // sha256 of the written corpus file
};

struct RawRow {
  size_t row = 0;  // 1-based data row
  std::map<std::string, std::string> fields;
  std::optional<Failure> failure;  // row could not be read at all
};

// Raw rows as string maps; blank lines are skipped. The input needs an "id"
// column (kSchemaMismatch otherwise). JSON scalars become strings and null
// is absent; CSV rows with the wrong field count and JSONL lines that are not
// flat objects carry a kMalformedValue failure.
std::vector<RawRow> read_raw_rows(const std::filesystem::path& path, DataFormat format);

// Validates every row and writes <out_dir>/corpus.jsonl plus
// <out_dir>/rejects.jsonl. Duplicate ids are rejected after the first.
CorpusSummary ingest(const std::filesystem::path& input, DataFormat format,
                     const std::filesystem::path& out_dir);

// One normalized record per line, in canonical JSON.
std::string corpus_jsonl(const std::vector<PersonaRecord>& records);
std::vector<PersonaRecord> load_corpus(const std::filesystem::path& corpus_jsonl_path);
// Writes the corpus in either format; CSV columns are the schema columns
// followed by the sorted union of gold score columns.
void export_corpus(const std::vector<PersonaRecord>& records, const std::filesystem::path& path,
                   DataFormat format);

std::string file_sha256(const std::filesystem::path& path);

// Cells are addressed as "<persona_id>|<condition id>|<question name>".
std::string cell_key(const std::string& persona_id, const Condition& c, QuestionDimension q);

enum class RunStatus { kPending, kRunning, kComplete, kPartial };
std::string_view run_status_name(RunStatus s);

struct RunManifest {
  std::string run_id;
  std::string corpus_path;
  std::string corpus_hash;
  std::vector<Condition> conditions;
  std::string profile;  // provider profile name
  GenerationConfig config;
  std::string mapping_version;
  Backend backend = Backend::kReplay;
  std::string created_at;
  RunStatus status = RunStatus::kPending;
  // cell_key -> "done" or the error code name of the last failure.
  std::map<std::string, std::string> cells;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

// Deterministic id from everything that determines generation requests.
std::string derive_run_id(const std::string& corpus_hash, const std::vector<Condition>& conditions,
                          const GenerationConfig& config, const std::string& mapping_version);

struct GenerationEntry {
  std::string persona_id;
  Condition condition = Condition::zero_shot();
  QuestionDimension question = QuestionDimension::kNumeracy;
  GenerationRecord record;

  bool operator==(const GenerationEntry&) const = default;
};

nlohmann::json entry_to_json(const GenerationEntry& e);
GenerationEntry entry_from_json(const nlohmann::json& j);

struct GenerationFilter {
  std::optional<std::string> persona_id;
  std::optional<Condition> condition;
  std::optional<QuestionDimension> question;
};

// Stable (persona_id, condition, question) order.
void sort_entries(std::vector<GenerationEntry>& entries);

class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path run_dir(const std::string& run_id) const;
  bool exists(const std::string& run_id) const;
  std::vector<std::string> list_runs() const;

  // Creates the run directory and writes the manifest.
  void create(const RunManifest& m);
  // Throws kUnknownRun.
  RunManifest load_manifest(const std::string& run_id) const;
  // Atomic replace.
  void save_manifest(const RunManifest& m);

  // Atomic single-line append. Throws kUnknownRun.
  void save_generation(const std::string& run_id, const GenerationEntry& e);
  // Later duplicates of a cell (from a resumed run) are dropped.
  std::vector<GenerationEntry> load_generations(const std::string& run_id,
                                                const GenerationFilter& filter = {}) const;

  void save_evaluation(const std::string& run_id, const nlohmann::json& row);
  std::vector<nlohmann::json> load_evaluations(const std::string& run_id) const;

 private:
  void require(const std::string& run_id) const;
  void append_line(const std::filesystem::path& p, const std::string& line);

  std::filesystem::path root_;
  std::mutex write_mu_;
};

struct ResponseRow {
  std::string persona_id;
  std::string condition;
  std::string question;
  std::string generated_text;
  std::string gold_text;

  bool operator==(const ResponseRow&) const = default;
};

inline const std::vector<std::string> kResponseColumns = {
    "persona_id", "condition", "question", "generated_text", "gold_text"};

// Gold text is looked up in the corpus regardless of whether the condition
// withheld it from the prompt.
std::vector<ResponseRow> response_rows(const std::vector<GenerationEntry>& entries,
                                       const std::map<std::string, PersonaRecord>& corpus);
// JSONL or CSV. CSV always has a header row, even when empty.
std::string render_responses(const std::vector<ResponseRow>& rows, DataFormat format);
std::vector<ResponseRow> import_responses(const std::filesystem::path& path, DataFormat format);

}  // namespace twinbench

#endif  // TWINBENCH_STORE_HPP_
