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

// The command layer behind the twinbench CLI. Every command works on the
// output directory layout:
//
//   <out>/corpus/{corpus,rejects}.jsonl   written by ingest
//   <out>/cache/generations.jsonl         chat record/replay cache
//   <out>/cache/embeddings.jsonl          embedding cache
//   <out>/runs/<run_id>/...               see store.hpp
//   <out>/runs/<run_id>/reports/*.{md,csv}

#ifndef TWINBENCH_COMMANDS_HPP_
#define TWINBENCH_COMMANDS_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "twinbench/condition.hpp"
#include "twinbench/config.hpp"
#include "twinbench/embedding_gateway.hpp"
#include "twinbench/llm_gateway.hpp"
#include "twinbench/report.hpp"
#include "twinbench/store.hpp"

namespace twinbench {

struct CommandContext {
  Config config = Config::defaults();
  Backend backend = Backend::kReplay;
  int parallelism = 4;
  std::filesystem::path out_dir = "twinbench-out";
  // Seams for tests; when unset, HTTP transports are built from the config.
  std::function<std::shared_ptr<Transport>(const ProviderProfile&)> chat_transport_factory;
  std::shared_ptr<EmbeddingProvider> embedding_provider;
  Sleeper sleeper;
  std::ostream* log = nullptr;

  std::filesystem::path generation_cache_path() const { return out_dir / "cache" / "generations.jsonl"; }
  std::filesystem::path embedding_cache_path() const { return out_dir / "cache" / "embeddings.jsonl"; }
  std::filesystem::path reports_dir(const std::string& run_id) const {
    return out_dir / "runs" / run_id / "reports";
  }
};

struct IngestResult {
  CorpusSummary summary;
  std::filesystem::path corpus_path;
  std::filesystem::path rejects_path;
};

IngestResult cmd_ingest(const CommandContext& ctx, const std::filesystem::path& input,
                        std::optional<DataFormat> format = std::nullopt);

struct RunRequest {
  std::filesystem::path corpus;  // normalized corpus JSONL
  std::vector<Condition> conditions;
  std::string profile;  // empty: config default
};

struct RunResult {
  std::string run_id;
  size_t total_cells = 0;
  size_t already_done = 0;  // skipped because a previous run stored them
  size_t generated = 0;     // new entries this invocation
  size_t failed = 0;
  std::map<std::string, size_t> failures_by_class;
};

// Plans, initializes and queries every (persona, condition, target) cell.
// Resumable: cells already stored for the run are skipped.
RunResult cmd_run(const CommandContext& ctx, const RunRequest& req);

struct EvalOutput {
  Report report;
  std::string markdown;
  std::string csv;
  std::filesystem::path markdown_path;
  std::filesystem::path csv_path;
  std::vector<std::string> warnings;
  size_t failed_items = 0;
};

// Mean cosine similarity of generated vs gold text per (condition group,
// question, embedding model), with paired t-test stars against zero-shot.
EvalOutput cmd_eval_similarity(const CommandContext& ctx, const std::string& run_id,
                               std::vector<std::string> embedding_models = {});
// Mean ROUGE-1 and ROUGE-L F1 per (condition group, question).
EvalOutput cmd_eval_rouge(const CommandContext& ctx, const std::string& run_id);
// Per-trait MSE of ratings estimated from each twin's answers.
EvalOutput cmd_eval_traits(const CommandContext& ctx, const std::string& run_id,
                           const std::string& profile = "");

struct FairnessRequest {
  std::optional<std::filesystem::path> predictions;  // JSONL
  std::optional<std::filesystem::path> metrics_csv;  // precomputed metrics, lift only
  std::optional<std::string> run_id;                 // corpus and report location
  std::optional<std::filesystem::path> corpus;       // when no run is given
  std::string baseline = "zero-shot";
};

EvalOutput cmd_eval_fairness(const CommandContext& ctx, const FairnessRequest& req);

// Generated and gold text for every stored generation of a run.
std::string cmd_export(const CommandContext& ctx, const std::string& run_id, DataFormat format);

// Re-renders every stored evaluation of a run; never calls a provider.
EvalOutput cmd_report(const CommandContext& ctx, const std::string& run_id);

struct CacheListing {
  size_t generation_records = 0;
  std::map<std::string, size_t> generations_by_model;
  size_t embedding_records = 0;
  std::map<std::string, size_t> embeddings_by_model;
  std::vector<std::string> problems;  // filled by verify
};

CacheListing cmd_cache_ls(const CommandContext& ctx);
// Recomputes every generation cache key and checks every embedding record.
CacheListing cmd_cache_verify(const CommandContext& ctx);

// Pure report builders over stored evaluation rows.
Report similarity_report(const std::vector<nlohmann::json>& evaluations, const std::string& llm_model,
                         const std::vector<std::string>& embedding_models);
Report rouge_report(const std::vector<nlohmann::json>& evaluations, const std::string& llm_model);
Report traits_report(const std::vector<nlohmann::json>& evaluations, const std::string& llm_model);

}  // namespace twinbench

#endif  // TWINBENCH_COMMANDS_HPP_
