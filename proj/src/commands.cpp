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

#include "twinbench/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "twinbench/csv.hpp"
#include "twinbench/fairness.hpp"
#include "twinbench/metrics.hpp"
#include "twinbench/parallel.hpp"
#include "twinbench/traits.hpp"
#include "twinbench/twin.hpp"

namespace twinbench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename... Args>
void note(const CommandContext& ctx, fmt::format_string<Args...> f, Args&&... args) {
  if (ctx.log != nullptr) *ctx.log << fmt::format(f, std::forward<Args>(args)...) << '\n';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string group_id(ConditionGroup g) {
  std::string s = lower(group_label(g));
  std::replace(s.begin(), s.end(), ' ', '-');
  return s;
}

ConditionGroup parse_group(std::string_view id) {
  for (auto g : kConditionGroupOrder) {
    if (group_id(g) == id) return g;
  }
  throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown condition group '{}'", id));
}

struct RunData {
  RunManifest manifest;
  std::map<std::string, PersonaRecord> corpus;
  std::vector<GenerationEntry> entries;
};

RunData load_run(const CommandContext& ctx, const std::string& run_id) {
  RunStore store(ctx.out_dir);
  RunData d;
  d.manifest = store.load_manifest(run_id);
  const fs::path corpus_path = d.manifest.corpus_path;
  if (file_sha256(corpus_path) != d.manifest.corpus_hash) {
    throw Error(ErrorCode::kCorpusChanged,
                fmt::format("{} no longer matches the corpus of run {}", corpus_path.string(), run_id));
  }
  for (auto& r : load_corpus(corpus_path)) d.corpus.emplace(r.id, std::move(r));
  d.entries = store.load_generations(run_id);
  return d;
}

std::shared_ptr<LlmGateway> make_llm_gateway(const CommandContext& ctx, const ProviderProfile& p) {
  std::shared_ptr<Transport> transport;
  if (ctx.chat_transport_factory) {
    transport = ctx.chat_transport_factory(p);
  } else if (ctx.backend == Backend::kLive) {
    transport = make_http_transport(p.base_url, p.timeout);
  }
  GatewayOptions o;
  o.backend = ctx.backend;
  o.chat_path = p.chat_path;
  o.api_key_env = p.api_key_env;
  o.retry = p.retry;
  o.max_in_flight = p.max_in_flight;
  o.sleeper = ctx.sleeper;
  return std::make_shared<LlmGateway>(
      transport, std::make_shared<GenerationCache>(ctx.generation_cache_path()), o);
}

std::unique_ptr<EmbeddingGateway> make_embedding_gateway(const CommandContext& ctx) {
  const auto& s = ctx.config.embedding;
  std::shared_ptr<EmbeddingProvider> provider = ctx.embedding_provider;
  EmbeddingOptions o;
  o.max_input_chars = s.max_input_chars;
  o.provider_batch_size = s.batch_size;
  o.max_in_flight = s.max_in_flight;
  // Local providers are deterministic and offline, so only the HTTP provider
  // is subject to replay.
  o.backend = Backend::kLive;
  if (!provider) {
    switch (s.provider) {
      case EmbeddingProviderKind::kHttp:
        o.backend = ctx.backend;
        if (ctx.backend == Backend::kLive) {
          provider = std::make_shared<HttpEmbeddingProvider>(
              std::shared_ptr<Transport>(make_http_transport(s.base_url, s.timeout)), s.path,
              s.api_key_env);
        }
        break;
      case EmbeddingProviderKind::kFixture:
        provider = std::make_shared<FixtureEmbeddingProvider>(FixtureEmbeddingProvider::load(s.fixture_path));
        break;
      case EmbeddingProviderKind::kHashing:
        provider = std::make_shared<HashingEmbeddingProvider>(s.dims);
        break;
    }
  }
  return std::make_unique<EmbeddingGateway>(
      provider, std::make_shared<EmbeddingCache>(ctx.embedding_cache_path()), o);
}

std::string eval_key(const json& row) {
  return fmt::format("{}|{}|{}|{}|{}|{}", row.value("kind", ""), row.value("model", ""),
                     row.value("embedding_model", ""), row.value("persona_id", ""),
                     row.value("condition", row.value("group", "")), row.value("question", ""));
}

// Appends rows whose key is not stored yet; returns the stored rows of `kind`.
std::vector<json> store_evaluations(const CommandContext& ctx, const std::string& run_id,
                                    const std::vector<json>& rows, const std::string& kind) {
  RunStore store(ctx.out_dir);
  std::set<std::string> have;
  for (const auto& r : store.load_evaluations(run_id)) have.insert(eval_key(r));
  for (const auto& r : rows) {
    if (have.insert(eval_key(r)).second) store.save_evaluation(run_id, r);
  }
  std::vector<json> out;
  for (auto& r : store.load_evaluations(run_id)) {
    if (r.value("kind", "") == kind) out.push_back(std::move(r));
  }
  return out;
}

EvalOutput finish(const Report& report, const fs::path& dir, const std::string& stem) {
  EvalOutput out;
  out.report = report;
  out.markdown = render_markdown(report);
  out.csv = render_csv(report);
  out.markdown_path = dir / (stem + ".md");
  out.csv_path = dir / (stem + ".csv");
  write_text_file(out.markdown_path, out.markdown);
  write_text_file(out.csv_path, out.csv);
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNaN;
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

std::vector<double> values_of(const std::map<std::string, double>& m) {
  std::vector<double> v;
  v.reserve(m.size());
  for (const auto& [k, x] : m) v.push_back(x);
  return v;
}

}  // namespace

IngestResult cmd_ingest(const CommandContext& ctx, const fs::path& input,
                        std::optional<DataFormat> format) {
  const DataFormat f = format ? *format : format_from_path(input);
  IngestResult r;
  const fs::path dir = ctx.out_dir / "corpus";
  r.summary = ingest(input, f, dir);
  r.corpus_path = dir / "corpus.jsonl";
  r.rejects_path = dir / "rejects.jsonl";
  note(ctx, "ingest: {} rows, {} accepted, {} rejected", r.summary.input_rows, r.summary.accepted,
       r.summary.rejects.size());
  return r;
}

RunResult cmd_run(const CommandContext& ctx, const RunRequest& req) {
  if (ctx.parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  const auto corpus = load_corpus(req.corpus);
  const std::string hash = file_sha256(req.corpus);
  const ProviderProfile& profile =
      ctx.config.profile(req.profile.empty() ? ctx.config.default_profile : req.profile);
  const MappingTable mapping = ctx.config.mapping();
  std::vector<Condition> conditions = req.conditions;
  if (conditions.empty()) conditions.assign(Condition::all().begin(), Condition::all().end());
  std::sort(conditions.begin(), conditions.end());
  conditions.erase(std::unique(conditions.begin(), conditions.end()), conditions.end());

  RunResult result;
  result.run_id = derive_run_id(hash, conditions, profile.generation, mapping.version);
  RunStore store(ctx.out_dir);
  RunManifest m;
  if (store.exists(result.run_id)) {
    m = store.load_manifest(result.run_id);
  } else {
    m.run_id = result.run_id;
    m.corpus_path = fs::absolute(req.corpus).lexically_normal().string();
    m.corpus_hash = hash;
    m.conditions = conditions;
    m.profile = profile.name;
    m.config = profile.generation;
    m.mapping_version = mapping.version;
    m.created_at = utc_timestamp();
    store.create(m);
  }
  m.backend = ctx.backend;
  m.status = RunStatus::kRunning;

  std::set<std::string> done;
  for (const auto& e : store.load_generations(result.run_id)) {
    done.insert(cell_key(e.persona_id, e.condition, e.question));
  }

  struct Cell {
    std::string persona_id;
    Condition condition;
    QuestionDimension question;
  };
  std::vector<GenerationPlan> plans;
  std::vector<Cell> cells;
  auto fail = [&](const std::string& key, ErrorCode code) {
    m.cells[key] = std::string(error_code_name(code));
    ++result.failed;
    ++result.failures_by_class[std::string(error_code_name(code))];
  };
  for (const auto& persona : corpus) {
    for (const auto& c : conditions) {
      std::optional<TwinState> twin;
      std::optional<ErrorCode> plan_error;
      try {
        twin = prepare_twin(plan_condition(c, persona), persona, mapping);
      } catch (const Error& e) {
        plan_error = e.code();
      }
      for (QuestionDimension q : targets_of(c)) {
        ++result.total_cells;
        const std::string key = cell_key(persona.id, c, q);
        if (done.count(key) != 0) {
          ++result.already_done;
          m.cells[key] = "done";
          continue;
        }
        if (plan_error) {
          fail(key, *plan_error);
          continue;
        }
        plans.push_back({*twin, q});
        cells.push_back({persona.id, c, q});
      }
    }
  }
  store.save_manifest(m);
  note(ctx, "run {}: {} cells, {} already stored, {} to generate", result.run_id, result.total_cells,
       result.already_done, plans.size());

  auto gateway = make_llm_gateway(ctx, profile);
  const size_t chunk = std::max<size_t>(32, static_cast<size_t>(ctx.parallelism) * 8);
  for (size_t lo = 0; lo < plans.size(); lo += chunk) {
    const size_t hi = std::min(plans.size(), lo + chunk);
    const std::vector<GenerationPlan> part(plans.begin() + lo, plans.begin() + hi);
    const auto res = run_generation_batch(*gateway, part, profile.generation, ctx.parallelism, mapping);
    for (size_t i = 0; i < res.size(); ++i) {
      const Cell& cell = cells[lo + i];
      const std::string key = cell_key(cell.persona_id, cell.condition, cell.question);
      if (res[i].ok()) {
        store.save_generation(result.run_id,
                              {cell.persona_id, cell.condition, cell.question, *res[i].value});
        m.cells[key] = "done";
        ++result.generated;
      } else {
        fail(key, res[i].failure->code);
        note(ctx, "  {}: {}", key, res[i].failure->message);
      }
    }
    store.save_manifest(m);
  }
  m.status = result.failed == 0 ? RunStatus::kComplete : RunStatus::kPartial;
  store.save_manifest(m);
  note(ctx, "run {}: {} generated, {} failed", result.run_id, result.generated, result.failed);
  return result;
}

Report similarity_report(const std::vector<json>& evaluations, const std::string& llm_model,
                         const std::vector<std::string>& embedding_models) {
  // (group, question, embedding model) -> persona -> similarity
  std::map<std::tuple<ConditionGroup, QuestionDimension, std::string>, std::map<std::string, double>> v;
  for (const auto& r : evaluations) {
    if (r.value("kind", "") != "similarity") continue;
    const Condition c = parse_condition(r.at("condition").get<std::string>());
    v[{group_of(c), parse_question(r.at("question").get<std::string>()),
       r.at("embedding_model").get<std::string>()}][r.at("persona_id").get<std::string>()] =
        r.at("value").get<double>();
  }
  Table t;
  t.name = "similarity";
  t.title = fmt::format("Similarity to gold answers ({})", llm_model);
  for (const auto& m : embedding_models) {
    for (QuestionDimension q : kReportQuestionOrder) t.columns.push_back(fmt::format("{} {}", m, question_abbrev(q)));
  }
  for (ConditionGroup g : kConditionGroupOrder) {
    TableRow row;
    row.label = std::string(group_label(g));
    for (const auto& m : embedding_models) {
      for (QuestionDimension q : kReportQuestionOrder) {
        Cell cell;
        const auto it = v.find({g, q, m});
        cell.value = it == v.end() ? kNaN : mean_of(values_of(it->second));
        const auto zs = v.find({ConditionGroup::kZeroShot, q, m});
        if (g != ConditionGroup::kZeroShot && it != v.end() && zs != v.end()) {
          std::vector<double> x, y;
          for (const auto& [pid, val] : it->second) {
            auto z = zs->second.find(pid);
            if (z == zs->second.end()) continue;
            x.push_back(val);
            y.push_back(z->second);
          }
          if (x.size() >= 2) {
            const TTestResult tt = paired_t_test(x, y);
            cell.significant = tt.p_two_sided < 0.05 && tt.t_stat > 0;
          }
        }
        row.cells.push_back(cell);
      }
    }
    t.rows.push_back(std::move(row));
  }
  mark_column_max(t);
  t.notes.push_back("* mean significantly above Zero-shot (paired t-test over personas, p < 0.05). "
                    "Bold: column maximum.");
  return Report{{t}};
}

Report rouge_report(const std::vector<json>& evaluations, const std::string& llm_model) {
  std::map<std::pair<ConditionGroup, QuestionDimension>, std::pair<std::vector<double>, std::vector<double>>> v;
  // Sorted by persona so means do not depend on storage order.
  std::vector<const json*> rows;
  for (const auto& r : evaluations) {
    if (r.value("kind", "") == "rouge") rows.push_back(&r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const json* a, const json* b) {
    return a->at("persona_id").get<std::string>() < b->at("persona_id").get<std::string>();
  });
  for (const json* r : rows) {
    const Condition c = parse_condition(r->at("condition").get<std::string>());
    auto& slot = v[{group_of(c), parse_question(r->at("question").get<std::string>())}];
    slot.first.push_back(r->at("rouge1_f1").get<double>());
    slot.second.push_back(r->at("rougel_f1").get<double>());
  }
  Table t;
  t.name = "rouge";
  t.title = fmt::format("ROUGE F1 against gold answers ({})", llm_model);
  t.sublabel_header = "Metric";
  for (QuestionDimension q : kReportQuestionOrder) t.columns.emplace_back(question_abbrev(q));
  for (ConditionGroup g : kConditionGroupOrder) {
    TableRow r1{std::string(group_label(g)), "ROUGE-1", {}};
    TableRow rl{std::string(group_label(g)), "ROUGE-L", {}};
    for (QuestionDimension q : kReportQuestionOrder) {
      const auto it = v.find({g, q});
      Cell a, b;
      a.value = it == v.end() ? kNaN : mean_of(it->second.first);
      b.value = it == v.end() ? kNaN : mean_of(it->second.second);
      r1.cells.push_back(a);
      rl.cells.push_back(b);
    }
    t.rows.push_back(std::move(r1));
    t.rows.push_back(std::move(rl));
  }
  t.notes.push_back("A: Anxiety, N: Numeracy, SL: Subjective health literacy, TP: Trust in physician.");
  return Report{{t}};
}

Report traits_report(const std::vector<json>& evaluations, const std::string& llm_model) {
  struct Acc {
    std::array<std::vector<double>, 5> sq;
    size_t rated = 0;
    size_t unparsable = 0;
  };
  std::map<ConditionGroup, Acc> acc;
  std::vector<const json*> rows;
  for (const auto& r : evaluations) {
    if (r.value("kind", "") == "traits") rows.push_back(&r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const json* a, const json* b) {
    return a->at("persona_id").get<std::string>() < b->at("persona_id").get<std::string>();
  });
  for (const json* r : rows) {
    Acc& a = acc[parse_group(r->at("group").get<std::string>())];
    if (r->contains("error")) {
      ++a.unparsable;
      continue;
    }
    const auto pred = r->at("predicted").get<std::vector<int>>();
    const auto gold = r->at("gold").get<std::vector<int>>();
    for (size_t i = 0; i < 5; ++i) {
      const double d = pred.at(i) - gold.at(i);
      a.sq[i].push_back(d * d);
    }
    ++a.rated;
  }
  Table t;
  t.name = "traits";
  t.title = fmt::format("MSE of estimated Big Five traits ({})", llm_model);
  for (BigFiveTrait tr : kBigFiveOrder) t.columns.emplace_back(label(tr));
  for (ConditionGroup g : kConditionGroupOrder) {
    auto it = acc.find(g);
    if (it == acc.end()) continue;
    TableRow row{std::string(group_label(g)), "", {}};
    for (size_t i = 0; i < 5; ++i) {
      Cell c;
      c.value = mean_of(it->second.sq[i]);
      row.cells.push_back(c);
    }
    t.rows.push_back(std::move(row));
    t.notes.push_back(fmt::format("{}: {} twins rated, {} unparsable replies skipped.", group_label(g),
                                  it->second.rated, it->second.unparsable));
  }
  return Report{{t}};
}

EvalOutput cmd_eval_similarity(const CommandContext& ctx, const std::string& run_id,
                               std::vector<std::string> embedding_models) {
  const RunData d = load_run(ctx, run_id);
  if (embedding_models.empty()) embedding_models = ctx.config.embedding.models;
  auto gw = make_embedding_gateway(ctx);
  std::vector<json> rows;
  std::vector<std::string> warnings;
  size_t failed = 0;
  for (const auto& model : embedding_models) {
    std::vector<std::string> texts;
    std::vector<const GenerationEntry*> used;
    for (const auto& e : d.entries) {
      const std::string* gold = d.corpus.count(e.persona_id) ? d.corpus.at(e.persona_id).gold_response(e.question) : nullptr;
      if (gold == nullptr) continue;
      texts.push_back(e.record.response_text);
      texts.push_back(*gold);
      used.push_back(&e);
    }
    const auto vecs = gw->embed_batch(texts, model, ctx.parallelism);
    for (size_t i = 0; i < used.size(); ++i) {
      const auto& a = vecs[2 * i];
      const auto& b = vecs[2 * i + 1];
      const GenerationEntry& e = *used[i];
      if (!a.ok() || !b.ok()) {
        ++failed;
        const Failure& f = a.ok() ? *b.failure : *a.failure;
        warnings.push_back(fmt::format("{} {}: {}", model, cell_key(e.persona_id, e.condition, e.question), f.message));
        continue;
      }
      rows.push_back(json{{"kind", "similarity"},
                          {"model", d.manifest.config.model_id},
                          {"embedding_model", model},
                          {"persona_id", e.persona_id},
                          {"condition", e.condition.id()},
                          {"question", question_name(e.question)},
                          {"value", cosine_similarity(*a.value, *b.value)}});
    }
  }
  const auto stored = store_evaluations(ctx, run_id, rows, "similarity");
  EvalOutput out = finish(similarity_report(stored, d.manifest.config.model_id, embedding_models),
                          ctx.reports_dir(run_id), "similarity");
  out.warnings = std::move(warnings);
  out.failed_items = failed;
  return out;
}

EvalOutput cmd_eval_rouge(const CommandContext& ctx, const std::string& run_id) {
  const RunData d = load_run(ctx, run_id);
  std::vector<json> rows;
  for (const auto& e : d.entries) {
    const std::string* gold = d.corpus.count(e.persona_id) ? d.corpus.at(e.persona_id).gold_response(e.question) : nullptr;
    if (gold == nullptr) continue;
    rows.push_back(json{{"kind", "rouge"},
                        {"model", d.manifest.config.model_id},
                        {"persona_id", e.persona_id},
                        {"condition", e.condition.id()},
                        {"question", question_name(e.question)},
                        {"rouge1_f1", rouge_n(e.record.response_text, *gold, 1).f1},
                        {"rougel_f1", rouge_l(e.record.response_text, *gold).f1}});
  }
  const auto stored = store_evaluations(ctx, run_id, rows, "rouge");
  return finish(rouge_report(stored, d.manifest.config.model_id), ctx.reports_dir(run_id), "rouge");
}

EvalOutput cmd_eval_traits(const CommandContext& ctx, const std::string& run_id, const std::string& profile_name) {
  const RunData d = load_run(ctx, run_id);
  const ProviderProfile& profile =
      ctx.config.profile(profile_name.empty() ? d.manifest.profile : profile_name);
  const MappingTable mapping = ctx.config.mapping();

  std::map<std::pair<std::string, ConditionGroup>, std::map<QuestionDimension, std::string>> answers;
  for (const auto& e : d.entries) answers[{e.persona_id, group_of(e.condition)}][e.question] = e.record.response_text;

  struct Item {
    std::string persona_id;
    ConditionGroup group;
    std::vector<ChatMessage> messages;
    std::array<int, 5> gold;
  };
  std::vector<Item> items;
  std::vector<std::string> warnings;
  for (const auto& [key, ans] : answers) {
    const auto it = d.corpus.find(key.first);
    if (it == d.corpus.end() || !it->second.psychological) {
      warnings.push_back(fmt::format("{}: no gold Big Five ratings", key.first));
      continue;
    }
    std::array<int, 5> gold{};
    for (BigFiveTrait tr : kBigFiveOrder) gold[static_cast<size_t>(tr)] = it->second.psychological->rating(tr);
    items.push_back({key.first, key.second, trait_messages(trait_transcript(ans), mapping), gold});
  }

  auto gw = make_llm_gateway(ctx, profile);
  std::vector<std::optional<json>> rows(items.size());
  std::vector<std::optional<std::string>> errors(items.size());
  parallel_for(items.size(), ctx.parallelism, [&](size_t i) {
    const Item& item = items[i];
    json row = {{"kind", "traits"},
                {"model", profile.generation.model_id},
                {"persona_id", item.persona_id},
                {"group", group_id(item.group)}};
    try {
      const std::string reply = gw->complete(item.messages, profile.generation);
      try {
        const auto pred = parse_trait_ratings(reply);
        row["predicted"] = pred;
        row["gold"] = item.gold;
      } catch (const Error& e) {
        row["error"] = error_code_name(e.code());
        row["message"] = e.what();
      }
      rows[i] = row;
    } catch (const Error& e) {
      errors[i] = fmt::format("{} {}: {}", item.persona_id, group_id(item.group), e.what());
    }
  });
  std::vector<json> ok;
  size_t failed = 0;
  for (size_t i = 0; i < items.size(); ++i) {
    if (rows[i]) ok.push_back(*rows[i]);
    if (errors[i]) {
      ++failed;
      warnings.push_back(*errors[i]);
    }
  }
  const auto stored = store_evaluations(ctx, run_id, ok, "traits");
  EvalOutput out = finish(traits_report(stored, profile.generation.model_id), ctx.reports_dir(run_id), "traits");
  out.warnings = std::move(warnings);
  out.failed_items = failed;
  return out;
}

namespace {

Table lift_table_of(const std::vector<DownstreamMetrics>& metrics, const std::string& baseline) {
  const auto rows = lift_table(metrics, baseline);
  Table t;
  t.name = "lift";
  t.title = fmt::format("Downstream metrics and lift over {}", baseline);
  t.sublabel_header = "Model";
  t.columns = {"MSE", "MSE lift", "Pearson's r", "r lift", "F1", "F1 lift", "AUC", "AUC lift"};
  for (const auto& r : rows) {
    TableRow row{r.metrics.condition, r.metrics.model, {}};
    const std::array<double, 4> vals = {r.metrics.mse, r.metrics.pearson_r, r.metrics.f1, r.metrics.auc};
    for (size_t i = 0; i < 4; ++i) {
      Cell v;
      v.value = vals[i];
      row.cells.push_back(v);
      Cell l;
      if (r.lifts) {
        l.value = (*r.lifts)[i] * 100.0;
        l.text = format_percent((*r.lifts)[i]);
      } else {
        l.value = kNaN;
        l.text = "--";
      }
      row.cells.push_back(l);
    }
    t.rows.push_back(std::move(row));
  }
  t.notes.push_back("Lift is relative to the baseline row of the same model; for MSE a decrease counts as lift.");
  return t;
}

std::optional<std::string> find_baseline(const std::vector<DownstreamMetrics>& rows, const std::string& want) {
  for (const auto& r : rows) {
    if (lower(r.condition) == lower(want)) return r.condition;
  }
  return std::nullopt;
}

}  // namespace

EvalOutput cmd_eval_fairness(const CommandContext& ctx, const FairnessRequest& req) {
  const fs::path dir = req.run_id ? ctx.reports_dir(*req.run_id) : ctx.out_dir / "reports";
  Report report;
  std::vector<std::string> warnings;
  std::vector<DownstreamMetrics> metrics;
  if (req.metrics_csv) {
    metrics = load_downstream_metrics(*req.metrics_csv);
  } else {
    if (!req.predictions) throw Error(ErrorCode::kInvalidArgument, "fairness: need predictions or a metrics file");
    fs::path corpus_path;
    if (req.run_id) {
      corpus_path = RunStore(ctx.out_dir).load_manifest(*req.run_id).corpus_path;
    } else if (req.corpus) {
      corpus_path = *req.corpus;
    } else {
      throw Error(ErrorCode::kInvalidArgument, "fairness: need a run or a corpus to join demographics");
    }
    std::map<std::string, DemographicTier> personas;
    for (const auto& r : load_corpus(corpus_path)) personas.emplace(r.id, r.demographic);
    const auto preds = load_predictions(*req.predictions, personas);
    const auto rows = fairness_report(preds, ctx.config.binarization);
    Table t;
    t.name = "downstream";
    t.title = "Downstream prediction and disparate impact";
    t.sublabel_header = "Model";
    t.columns.assign(kFairnessColumns.begin(), kFairnessColumns.end());
    for (const auto& r : rows) {
      TableRow row{r.condition, r.model, {}};
      for (double v : r.values) {
        Cell c;
        c.value = v;
        row.cells.push_back(c);
      }
      t.rows.push_back(std::move(row));
      for (const auto& n : r.notes) {
        t.notes.push_back(fmt::format("{} / {}: {}", r.condition, r.model, n));
        warnings.push_back(t.notes.back());
      }
      metrics.push_back(downstream_of(r));
    }
    report.tables.push_back(std::move(t));
  }
  if (auto base = find_baseline(metrics, req.baseline)) {
    report.tables.push_back(lift_table_of(metrics, *base));
  } else if (req.metrics_csv) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("no '{}' baseline rows in metrics file", req.baseline));
  } else {
    warnings.push_back(fmt::format("no '{}' rows; lift table omitted", req.baseline));
  }
  EvalOutput out = finish(report, dir, "fairness");
  out.warnings = std::move(warnings);
  return out;
}

std::string cmd_export(const CommandContext& ctx, const std::string& run_id, DataFormat format) {
  const RunData d = load_run(ctx, run_id);
  return render_responses(response_rows(d.entries, d.corpus), format);
}

EvalOutput cmd_report(const CommandContext& ctx, const std::string& run_id) {
  RunStore store(ctx.out_dir);
  const RunManifest m = store.load_manifest(run_id);
  const auto evals = store.load_evaluations(run_id);
  std::vector<std::string> models;
  std::set<std::string> seen;
  for (const auto& r : evals) {
    if (r.value("kind", "") == "similarity") seen.insert(r.at("embedding_model").get<std::string>());
  }
  for (const auto& mname : ctx.config.embedding.models) {
    if (seen.erase(mname) != 0) models.push_back(mname);
  }
  models.insert(models.end(), seen.begin(), seen.end());

  Report all;
  auto has = [&](const std::string& kind) {
    return std::any_of(evals.begin(), evals.end(), [&](const json& r) { return r.value("kind", "") == kind; });
  };
  if (has("similarity")) {
    for (auto& t : similarity_report(evals, m.config.model_id, models).tables) all.tables.push_back(std::move(t));
  }
  if (has("rouge")) {
    for (auto& t : rouge_report(evals, m.config.model_id).tables) all.tables.push_back(std::move(t));
  }
  if (has("traits")) {
    std::string trait_model = m.config.model_id;
    for (const auto& r : evals) {
      if (r.value("kind", "") == "traits") {
        trait_model = r.value("model", trait_model);
        break;
      }
    }
    for (auto& t : traits_report(evals, trait_model).tables) all.tables.push_back(std::move(t));
  }
  return finish(all, ctx.reports_dir(run_id), "report");
}

CacheListing cmd_cache_ls(const CommandContext& ctx) {
  CacheListing l;
  if (fs::exists(ctx.generation_cache_path())) {
    GenerationCache c(ctx.generation_cache_path());
    for (const auto& r : c.records()) {
      ++l.generation_records;
      ++l.generations_by_model[r.config.model_id];
    }
  }
  if (fs::exists(ctx.embedding_cache_path())) {
    std::ifstream in(ctx.embedding_cache_path());
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      try {
        const json j = json::parse(line);
        ++l.embedding_records;
        ++l.embeddings_by_model[j.at("model").get<std::string>()];
      } catch (const std::exception&) {
        // counted by verify
      }
    }
  }
  return l;
}

CacheListing cmd_cache_verify(const CommandContext& ctx) {
  CacheListing l = cmd_cache_ls(ctx);
  if (fs::exists(ctx.generation_cache_path())) {
    std::ifstream in(ctx.generation_cache_path());
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const auto r = json::parse(line).get<GenerationRecord>();
        if (cache_key(r.messages, r.config) != r.cache_key) {
          l.problems.push_back(fmt::format("generations.jsonl:{}: key does not match request", lineno));
        }
      } catch (const std::exception& e) {
        l.problems.push_back(fmt::format("generations.jsonl:{}: {}", lineno, e.what()));
      }
    }
  }
  if (fs::exists(ctx.embedding_cache_path())) {
    std::ifstream in(ctx.embedding_cache_path());
    std::map<std::string, size_t> dims;
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const json j = json::parse(line);
        const EmbeddingVector v(j.at("model").get<std::string>(), j.at("vector").get<std::vector<double>>());
        if (j.at("key").get<std::string>().size() != 64) throw Error(ErrorCode::kMalformedValue, "bad key");
        auto [it, inserted] = dims.emplace(v.model_id(), v.dims());
        if (!inserted && it->second != v.dims()) {
          l.problems.push_back(fmt::format("embeddings.jsonl:{}: {} dims, expected {}", lineno, v.dims(), it->second));
        }
      } catch (const std::exception& e) {
        l.problems.push_back(fmt::format("embeddings.jsonl:{}: {}", lineno, e.what()));
      }
    }
  }
  return l;
}

}  // namespace twinbench
