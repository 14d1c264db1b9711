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

// twinbench command-line driver.
//
// Exit status: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include "twinbench/commands.hpp"
#include "twinbench/csv.hpp"
#include "twinbench/error.hpp"

using namespace twinbench;
namespace fs = std::filesystem;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string config_path;
  std::string backend = "replay";
  int parallelism = 4;
  std::string out = "twinbench-out";
  bool error_json = false;
  bool quiet = false;
};

void print_warnings(const EvalOutput& out) {
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
  if (out.failed_items > 0) std::cerr << out.failed_items << " items failed\n";
}

void print_eval(const EvalOutput& out) {
  std::cout << out.markdown;
  std::cout << "\nwrote " << out.markdown_path.string() << " and " << out.csv_path.string() << '\n';
  print_warnings(out);
}

int report_error(const Globals& g, const std::string& code, const std::string& message, int status) {
  if (g.error_json) {
    std::cerr << nlohmann::json{{"error", code}, {"message", message}, {"exit_code", status}}.dump() << '\n';
  } else {
    std::cerr << "twinbench: " << code << ": " << message << '\n';
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persona digital-twin benchmark"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Configuration file (JSON)");
  app.add_option("--backend", g.backend, "live or replay")->check(CLI::IsMember({"live", "replay"}));
  app.add_option("--parallelism", g.parallelism, "Concurrent provider requests")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--error-json", g.error_json, "Report failures as one JSON line on stderr");
  app.add_flag("-q,--quiet", g.quiet, "No progress messages");

  // ingest
  std::string ingest_input, ingest_format;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate and normalize a survey corpus");
  ingest_cmd->add_option("input", ingest_input, "CSV or JSONL file")->required();
  ingest_cmd->add_option("--format", ingest_format, "csv or jsonl (default: from extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  // run
  std::string run_corpus, run_profile;
  std::vector<std::string> run_conditions = {"all"};
  auto* run_cmd = app.add_subcommand("run", "Generate twin answers for every condition");
  run_cmd->add_option("--corpus", run_corpus, "Normalized corpus (default: <out>/corpus/corpus.jsonl)");
  run_cmd->add_option("--conditions", run_conditions, "Condition ids, persona-few-shot or all")->delimiter(',');
  run_cmd->add_option("--profile", run_profile, "Provider profile name");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a run");
  eval_cmd->require_subcommand(1);
  std::string eval_run, traits_profile;
  std::vector<std::string> sim_models;
  auto* sim_cmd = eval_cmd->add_subcommand("sim", "Embedding similarity to gold answers");
  sim_cmd->add_option("--run", eval_run, "Run id")->required();
  sim_cmd->add_option("--models", sim_models, "Embedding model ids")->delimiter(',');
  auto* rouge_cmd = eval_cmd->add_subcommand("rouge", "ROUGE-1 and ROUGE-L against gold answers");
  rouge_cmd->add_option("--run", eval_run, "Run id")->required();
  auto* traits_cmd = eval_cmd->add_subcommand("traits", "Big Five estimation from twin transcripts");
  traits_cmd->add_option("--run", eval_run, "Run id")->required();
  traits_cmd->add_option("--profile", traits_profile, "Provider profile used as the rater");
  FairnessRequest fair;
  std::string fair_run, fair_predictions, fair_metrics, fair_corpus;
  auto* fair_cmd = eval_cmd->add_subcommand("fairness", "Downstream metrics, disparate impact and lift");
  fair_cmd->add_option("--run", fair_run, "Run id (report location and corpus)");
  fair_cmd->add_option("--predictions", fair_predictions, "Prediction JSONL");
  fair_cmd->add_option("--metrics", fair_metrics, "Precomputed metrics CSV (lift only)");
  fair_cmd->add_option("--corpus", fair_corpus, "Corpus for demographics when no run is given");
  fair_cmd->add_option("--baseline", fair.baseline, "Baseline condition label");

  // report / export
  std::string report_run;
  auto* report_cmd = app.add_subcommand("report", "Re-render every stored evaluation of a run");
  report_cmd->add_option("--run", report_run, "Run id")->required();
  std::string export_run, export_format = "jsonl", export_output;
  auto* export_cmd = app.add_subcommand("export", "Export generated and gold answers");
  export_cmd->add_option("--run", export_run, "Run id")->required();
  export_cmd->add_option("--format", export_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  export_cmd->add_option("-o,--output", export_output, "Output file (default: stdout)");

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "Inspect the record/replay caches");
  cache_cmd->require_subcommand(1);
  auto* cache_ls = cache_cmd->add_subcommand("ls", "Count cached records");
  auto* cache_verify = cache_cmd->add_subcommand("verify", "Check cache integrity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report_error(g, "UsageError", e.what(), kExitUsage);
  }

  CommandContext ctx;
  try {
    ctx.config = g.config_path.empty() ? Config::defaults() : Config::load(g.config_path);
    ctx.backend = parse_backend(g.backend);
    ctx.parallelism = g.parallelism;
    ctx.out_dir = g.out;
    if (!g.quiet) ctx.log = &std::cerr;
  } catch (const Error& e) {
    return report_error(g, std::string(error_code_name(e.code())), e.what(), kExitRuntime);
  }

  // Argument-level problems detected before any work starts are usage errors.
  std::vector<Condition> conditions;
  try {
    if (run_cmd->parsed()) conditions = parse_condition_list(run_conditions);
    if (!run_profile.empty()) ctx.config.profile(run_profile);
    if (!traits_profile.empty()) ctx.config.profile(traits_profile);
  } catch (const Error& e) {
    return report_error(g, std::string(error_code_name(e.code())), e.what(), kExitUsage);
  }

  try {
    if (ingest_cmd->parsed()) {
      std::optional<DataFormat> f;
      if (!ingest_format.empty()) f = parse_format(ingest_format);
      const IngestResult r = cmd_ingest(ctx, ingest_input, f);
      std::cout << fmt::format("input rows: {}\naccepted: {}\nrejected: {}\n", r.summary.input_rows,
                               r.summary.accepted, r.summary.rejects.size());
      for (const auto& [cls, n] : r.summary.rejects_by_class) std::cout << fmt::format("  {}: {}\n", cls, n);
      for (const auto& col : r.summary.ignored_columns) std::cout << "ignored column: " << col << '\n';
      std::cout << "corpus: " << r.corpus_path.string() << "\nrejects: " << r.rejects_path.string()
                << "\ncorpus sha256: " << r.summary.corpus_hash << '\n';
    } else if (run_cmd->parsed()) {
      RunRequest req;
      req.corpus = run_corpus.empty() ? ctx.out_dir / "corpus" / "corpus.jsonl" : fs::path(run_corpus);
      req.conditions = conditions;
      req.profile = run_profile;
      const RunResult r = cmd_run(ctx, req);
      std::cout << fmt::format("run: {}\ncells: {}\nalready stored: {}\ngenerated: {}\nfailed: {}\n", r.run_id,
                               r.total_cells, r.already_done, r.generated, r.failed);
      for (const auto& [cls, n] : r.failures_by_class) std::cout << fmt::format("  {}: {}\n", cls, n);
      if (r.failed > 0) {
        return report_error(g, "PartialRun", fmt::format("{} of {} cells failed", r.failed, r.total_cells),
                            kExitRuntime);
      }
    } else if (sim_cmd->parsed()) {
      print_eval(cmd_eval_similarity(ctx, eval_run, sim_models));
    } else if (rouge_cmd->parsed()) {
      print_eval(cmd_eval_rouge(ctx, eval_run));
    } else if (traits_cmd->parsed()) {
      print_eval(cmd_eval_traits(ctx, eval_run, traits_profile));
    } else if (fair_cmd->parsed()) {
      if (!fair_run.empty()) fair.run_id = fair_run;
      if (!fair_predictions.empty()) fair.predictions = fair_predictions;
      if (!fair_metrics.empty()) fair.metrics_csv = fair_metrics;
      if (!fair_corpus.empty()) fair.corpus = fair_corpus;
      if (!fair.predictions && !fair.metrics_csv) {
        return report_error(g, "UsageError", "eval fairness needs --predictions or --metrics", kExitUsage);
      }
      print_eval(cmd_eval_fairness(ctx, fair));
    } else if (report_cmd->parsed()) {
      print_eval(cmd_report(ctx, report_run));
    } else if (export_cmd->parsed()) {
      const std::string text = cmd_export(ctx, export_run, parse_format(export_format));
      if (export_output.empty()) {
        std::cout << text;
      } else {
        write_text_file(export_output, text);
      }
    } else if (cache_ls->parsed() || cache_verify->parsed()) {
      const CacheListing l = cache_verify->parsed() ? cmd_cache_verify(ctx) : cmd_cache_ls(ctx);
      std::cout << fmt::format("generations: {}\n", l.generation_records);
      for (const auto& [m, n] : l.generations_by_model) std::cout << fmt::format("  {}: {}\n", m, n);
      std::cout << fmt::format("embeddings: {}\n", l.embedding_records);
      for (const auto& [m, n] : l.embeddings_by_model) std::cout << fmt::format("  {}: {}\n", m, n);
      for (const auto& p : l.problems) std::cout << "problem: " << p << '\n';
      if (!l.problems.empty()) {
        return report_error(g, "CacheCorrupt", fmt::format("{} problems found", l.problems.size()), kExitRuntime);
      }
    }
  } catch (const Error& e) {
    return report_error(g, std::string(error_code_name(e.code())), e.what(), kExitRuntime);
  } catch (const std::exception& e) {
    return report_error(g, "InternalError", e.what(), kExitRuntime);
  }
  return 0;
}
