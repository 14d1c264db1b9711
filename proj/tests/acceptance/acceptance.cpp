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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include "fairness_fixtures.hpp"
#include "fakes.hpp"
#include "fixtures.hpp"
#include "metric_oracles.hpp"
#include "twinbench/commands.hpp"
#include "twinbench/csv.hpp"
#include "twinbench/fairness.hpp"
#include "twinbench/metrics.hpp"
#include "twinbench/twin.hpp"

using namespace twinbench;
using namespace twinbench::testing;
namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (problems.size() < 5) problems.push_back(what);
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Condition> all_conditions() { return {Condition::all().begin(), Condition::all().end()}; }

std::vector<PersonaRecord> synthetic_personas(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PersonaRecord> out;
  for (int i = 0; i < n; ++i) out.push_back(random_persona(rng, fmt::format("a-{:04}", i)));
  return out;
}

// Context over a fresh directory holding `personas` as corpus.jsonl.
CommandContext context_for(const fs::path& dir, const std::vector<PersonaRecord>& personas) {
  write_text_file(dir / "corpus.jsonl", corpus_jsonl(personas));
  CommandContext ctx;
  ctx.out_dir = dir / "out";
  ctx.config.embedding.provider = EmbeddingProviderKind::kHashing;
  ctx.sleeper = [](std::chrono::milliseconds) {};
  return ctx;
}

void copy_caches(const CommandContext& from, const CommandContext& to) {
  fs::create_directories(to.generation_cache_path().parent_path());
  for (const auto& p : {from.generation_cache_path(), from.embedding_cache_path()}) {
    if (fs::exists(p)) fs::copy_file(p, to.out_dir / "cache" / p.filename(), fs::copy_options::overwrite_existing);
  }
}

// ---------------------------------------------------------------------------

Verdict condition_matrix() {
  Verdict v;
  const auto t0 = Clock::now();
  const auto& all = Condition::all();
  v.expect(all.size() == 8, "expected 8 conditions");
  std::set<std::string> ids;
  std::set<QuestionDimension> withheld;
  int few_shot = 0;
  for (const auto& c : all) {
    ids.insert(c.id());
    if (c.kind() == ConditionKind::kPersonaFewShot) {
      ++few_shot;
      withheld.insert(*c.withheld());
    } else {
      v.expect(!c.withheld().has_value(), c.id() + " withholds a question");
    }
  }
  v.expect(ids.size() == 8, "condition ids are not distinct");
  v.expect(few_shot == 4 && withheld == std::set<QuestionDimension>(kQuestionOrder.begin(), kQuestionOrder.end()),
           "few-shot variants do not withhold each question exactly once");

  const auto personas = synthetic_personas(1000, 20260101);
  const MappingTable& mapping = MappingTable::builtin();
  size_t checked = 0;
  size_t oracle_leaks_seen = 0;
  for (const auto& p : personas) {
    for (const auto& c : all) {
      const TwinState twin = prepare_twin(plan_condition(c, p), p, mapping);
      for (QuestionDimension q : targets_of(c)) {
        const std::string prompt = json(build_chat_messages(twin, q, mapping)).dump();
        const std::string& gold = *p.gold_response(q);
        const bool contains = prompt.find(gold) != std::string::npos;
        if (c.kind() == ConditionKind::kPersonaFewShot) {
          v.expect(!contains, fmt::format("{} {} prompt contains the withheld answer", p.id, c.id()));
          ++checked;
        } else if (c.kind() == ConditionKind::kPersonaOracle) {
          // The check has teeth: revealing conditions do contain the answer.
          if (contains) ++oracle_leaks_seen;
        }
      }
    }
  }
  v.expect(oracle_leaks_seen == personas.size() * 4, "oracle prompts did not carry the gold answers");
  const double secs = seconds_since(t0);
  v.expect(secs < 5.0, fmt::format("took {:.2f} s", secs));
  v.detail = fmt::format("8 conditions, withheld set bijective, {} few-shot prompts clean, {:.2f} s", checked, secs);
  return v;
}

Verdict metric_oracles() {
  Verdict v;
  std::mt19937_64 rng(42);
  int rouge_pairs = 0;
  for (int i = 0; i < 500; ++i) {
    const auto a = oracle::random_tokens(rng, 12, 6);
    const auto b = oracle::random_tokens(rng, 12, 6);
    const auto lib1 = rouge_n_tokens(a, b, 1);
    const auto ora1 = oracle::rouge_n(a, b, 1);
    const auto libl = rouge_l_tokens(a, b);
    const auto oral = oracle::rouge_l(a, b);
    v.expect(lib1.precision == ora1.precision && lib1.recall == ora1.recall && lib1.f1 == ora1.f1,
             fmt::format("ROUGE-1 mismatch on pair {}", i));
    v.expect(libl.precision == oral.precision && libl.recall == oral.recall && libl.f1 == oral.f1,
             fmt::format("ROUGE-L mismatch on pair {}", i));
    ++rouge_pairs;
  }
  double worst_cos = 0;
  std::normal_distribution<double> normal;
  for (int i = 0; i < 1000; ++i) {
    const size_t d = 1 + rng() % 64;
    std::vector<double> a(d), b(d);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    worst_cos = std::max(worst_cos, std::fabs(cosine_similarity(a, b) - oracle::cosine(a, b)));
  }
  v.expect(worst_cos <= 1e-9, fmt::format("cosine error {:.3g}", worst_cos));
  int auc_cases = 0;
  for (size_t n = 2; n <= 50; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      std::vector<double> scores(n);
      std::vector<bool> gold(n);
      for (size_t i = 0; i < n; ++i) {
        scores[i] = static_cast<double>(rng() % 7);  // frequent ties
        gold[i] = rng() % 2 == 0;
      }
      gold[0] = true;
      gold[1] = false;
      v.expect(auc_roc(scores, gold) == oracle::auc(scores, gold), fmt::format("AUC mismatch at n={}", n));
      ++auc_cases;
    }
  }
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {2, 4, 6};
  const TTestResult t = paired_t_test(x, y);
  v.expect(std::fabs(t.t_stat - (-3.4641)) <= 1e-3, fmt::format("t = {}", t.t_stat));
  v.expect(std::fabs(t.p_two_sided - 0.0742) <= 1e-3, fmt::format("p = {}", t.p_two_sided));
  v.detail = fmt::format("{} ROUGE pairs exact, cosine max error {:.1e}, {} AUC cases exact, t={:.4f} p={:.4f}",
                         rouge_pairs, worst_cos, auc_cases, t.t_stat, t.p_two_sided);
  return v;
}

Verdict fairness() {
  Verdict v;
  const std::vector<Attribute> attrs(kAttributeOrder.begin(), kAttributeOrder.end());
  const auto balanced = balanced_corpus();
  for (Attribute a : attrs) {
    v.expect(di_single(balanced, a) == 1.0, fmt::format("balanced DI_{} != 1", attribute_name(a)));
  }
  v.expect(di_interaction(balanced, attrs, 2).value == 1.0, "balanced DI+ != 1");
  v.expect(di_interaction(balanced, attrs, 3).value == 1.0, "balanced DI++ != 1");

  const auto skew = skew_corpus();
  double worst_skew = 0;
  for (Attribute a : attrs) worst_skew = std::max(worst_skew, std::fabs(di_single(skew, a) - 0.5));
  worst_skew = std::max(worst_skew, std::fabs(di_interaction(skew, attrs, 2).value - 0.5));
  worst_skew = std::max(worst_skew, std::fabs(di_interaction(skew, attrs, 3).value - 0.5));
  v.expect(worst_skew <= 1e-9, fmt::format("skew deviation {:.3g}", worst_skew));

  std::mt19937_64 rng(99);
  double worst_inv = 0;
  int inversions = 0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<LabeledPrediction> preds;
    for (int mask = 0; mask < 32; ++mask) {
      const int n = 3 + static_cast<int>(rng() % 6);
      add_cell(preds, mask_bits(mask), n, 1 + static_cast<int>(rng() % (n - 1)));
    }
    for (Attribute a : attrs) {
      BinarizationPolicy inv;
      inv.inverted = {a};
      const double d = di_single(preds, a);
      const double di = di_single(preds, a, inv);
      worst_inv = std::max(worst_inv, std::fabs(d * di - 1.0));
      ++inversions;
    }
  }
  v.expect(worst_inv <= 1e-12, fmt::format("inversion error {:.3g}", worst_inv));
  v.detail = fmt::format("balanced DI/DI+/DI++ = 1 exactly, skew max deviation {:.1e}, {} inversions within {:.1e}",
                         worst_skew, inversions, worst_inv);
  return v;
}

Verdict lift_arithmetic() {
  Verdict v;
  const fs::path dir = temp_dir("acc-lift");
  const fs::path metrics = dir / "metrics.csv";
  write_text_file(metrics,
                  "condition,model,mse,pearson_r,f1,auc\n"
                  "Persona Few-shot,GPT-4o,0.36,0.27,0.61,0.63\n"
                  "Persona Few-shot,Llama-3-70b,0.35,0.30,0.64,0.65\n"
                  "Persona Zero-shot,GPT-4o,0.43,0.12,0.44,0.56\n"
                  "Persona Zero-shot,Llama-3-70b,0.47,0.10,0.47,0.55\n"
                  "Zero-Shot,GPT-4o,0.47,0.03,0.26,0.51\n"
                  "Zero-Shot,Llama-3-70b,0.47,0.03,0.28,0.51\n");
  CommandContext ctx;
  ctx.out_dir = dir / "out";
  FairnessRequest req;
  req.metrics_csv = metrics;
  const EvalOutput out = cmd_eval_fairness(ctx, req);
  // Reference lifts in percent: (MSE, r, F1, AUC) per non-baseline row.
  const std::map<std::pair<std::string, std::string>, std::array<double, 4>> reference = {
      {{"Persona Few-shot", "GPT-4o"}, {23.4, 800.0, 134.6, 23.5}},
      {{"Persona Few-shot", "Llama-3-70b"}, {25.5, 900.0, 128.6, 27.5}},
      {{"Persona Zero-shot", "GPT-4o"}, {8.5, 300.0, 69.2, 9.8}},
      {{"Persona Zero-shot", "Llama-3-70b"}, {0.0, 233.3, 67.9, 7.8}},
  };
  // Read back from the machine-readable report, not the in-memory table.
  const auto rows = parse_csv(read_text_file(out.csv_path));
  const std::array<std::string, 4> lift_cols = {"MSE lift", "r lift", "F1 lift", "AUC lift"};
  int matched = 0;
  double worst = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto it = reference.find({r[1], r[2]});
    if (it == reference.end()) continue;
    for (size_t k = 0; k < 4; ++k) {
      if (r[3] != lift_cols[k]) continue;
      const double err = std::fabs(std::stod(r[4]) - it->second[k]);
      worst = std::max(worst, err);
      v.expect(err <= 0.1, fmt::format("{} {} {}: {} vs {}", r[1], r[2], r[3], r[4], it->second[k]));
      ++matched;
    }
  }
  v.expect(matched == 16, fmt::format("matched {} of 16 reference lifts", matched));
  v.expect(out.markdown.find("| 800.0% |") != std::string::npos, "markdown lacks 800.0%");
  v.detail = fmt::format("{} reference lifts reproduced (r 800.0%, MSE 23.4%, F1 134.6%), max error {:.3f} pp",
                         matched, worst);
  fs::remove_all(dir);
  return v;
}

// Chat fake: rating requests get fixed ratings, everything else an echo.
ScriptedTransport::Handler recording_provider(const MappingTable& mapping, std::function<std::string(const std::string&)> rater) {
  return [&mapping, rater](const std::string& path, const std::string& body) {
    const auto msgs = json::parse(body).at("messages");
    if (msgs.at(0).at("content").get<std::string>() == mapping.trait_system_prompt) {
      return HttpResponse{200, chat_reply(rater(msgs.back().at("content").get<std::string>())), {}};
    }
    return echo_chat(path, body);
  };
}

std::string fixed_ratings(const std::string&) {
  return "Extraverted: 3\nAgreeable: 4\nConscientious: 2\nStable: 3\nOpen: 5\n";
}

Verdict end_to_end_replay() {
  Verdict v;
  const auto personas = synthetic_personas(20, 555);
  const MappingTable& mapping = MappingTable::builtin();
  ::setenv("OPENAI_API_KEY", "acceptance", 1);

  // Record once against a fake provider.
  const fs::path rec_dir = temp_dir("acc-e2e-rec");
  CommandContext rec = context_for(rec_dir, personas);
  rec.backend = Backend::kLive;
  auto provider = std::make_shared<ScriptedTransport>(recording_provider(mapping, fixed_ratings));
  rec.chat_transport_factory = [&](const ProviderProfile&) { return provider; };
  const RunResult recorded = cmd_run(rec, {rec_dir / "corpus.jsonl", all_conditions(), ""});
  cmd_eval_traits(rec, recorded.run_id);

  const auto t0 = Clock::now();
  std::vector<std::string> reports;
  int network_calls = 0;
  size_t cells = 0;
  for (int pass = 0; pass < 2; ++pass) {
    const fs::path dir = temp_dir(fmt::format("acc-e2e-replay{}", pass));
    CommandContext ctx = context_for(dir, personas);
    copy_caches(rec, ctx);
    ctx.backend = Backend::kReplay;
    auto forbidden = std::make_shared<ForbiddenTransport>();
    ctx.chat_transport_factory = [&](const ProviderProfile&) { return forbidden; };
    const RunResult r = cmd_run(ctx, {dir / "corpus.jsonl", all_conditions(), ""});
    v.expect(r.failed == 0, fmt::format("replay pass {}: {} cells failed", pass, r.failed));
    v.expect(r.run_id == recorded.run_id, "run id differs between record and replay");
    cells = r.total_cells;
    std::string bundle;
    for (const EvalOutput& o : {cmd_eval_similarity(ctx, r.run_id), cmd_eval_rouge(ctx, r.run_id),
                                cmd_eval_traits(ctx, r.run_id), cmd_report(ctx, r.run_id)}) {
      v.expect(o.failed_items == 0, fmt::format("replay pass {}: {} eval items failed", pass, o.failed_items));
      bundle += read_text_file(o.markdown_path) + read_text_file(o.csv_path);
    }
    bundle += cmd_export(ctx, r.run_id, DataFormat::kCsv);
    reports.push_back(bundle);
    network_calls += forbidden->calls;
    fs::remove_all(dir);
  }
  const double secs = seconds_since(t0);
  v.expect(cells == 20 * 20, fmt::format("{} cells", cells));
  v.expect(network_calls == 0, fmt::format("{} provider calls during replay", network_calls));
  v.expect(reports[0] == reports[1], "reports differ between replay runs");
  v.expect(secs < 60.0, fmt::format("took {:.1f} s", secs));
  v.detail = fmt::format("20 personas x 8 conditions = {} cells, {} provider calls, {} report bytes identical, {:.2f} s",
                         cells, network_calls, reports[0].size(), secs);
  fs::remove_all(rec_dir);
  return v;
}

Verdict gateway_resilience() {
  Verdict v;
  ::setenv("OPENAI_API_KEY", "acceptance", 1);
  auto transport = std::make_shared<ScriptedTransport>();
  transport->push(429, "{\"error\":\"rate limited\"}");
  transport->push(429, "{\"error\":\"rate limited\"}");
  transport->push(200, chat_reply("fine, thanks"));
  std::vector<int64_t> slept;
  GatewayOptions opts;
  opts.backend = Backend::kLive;
  opts.sleeper = [&](std::chrono::milliseconds d) { slept.push_back(d.count()); };
  LlmGateway gw(transport, std::make_shared<GenerationCache>(), opts);
  const GenerationRecord got = gw.complete_record({{"user", "How are you?"}}, default_profile("gpt-4o"));
  v.expect(got.response_text == "fine, thanks", "wrong reply");
  v.expect(got.retries == 2, fmt::format("{} retries", got.retries));
  v.expect(transport->calls == 3, fmt::format("{} calls", transport->calls.load()));
  v.expect(slept.size() == 2 && std::is_sorted(slept.begin(), slept.end()), "backoff decreased");
  v.expect(got.backoff_ms == slept, "recorded backoff differs from the sleeps");

  // Replay with exactly one record missing.
  const auto personas = synthetic_personas(2, 777);
  std::vector<Condition> conds;
  for (const auto& c : Condition::all()) {
    if (c != Condition::zero_shot()) conds.push_back(c);  // persona-free prompts coincide across personas
  }
  const fs::path rec_dir = temp_dir("acc-gw-rec");
  CommandContext rec = context_for(rec_dir, personas);
  rec.backend = Backend::kLive;
  auto echo = std::make_shared<ScriptedTransport>(echo_chat);
  rec.chat_transport_factory = [&](const ProviderProfile&) { return echo; };
  const RunResult full = cmd_run(rec, {rec_dir / "corpus.jsonl", conds, ""});

  const fs::path dir = temp_dir("acc-gw-replay");
  CommandContext ctx = context_for(dir, personas);
  copy_caches(rec, ctx);
  std::string cache = read_text_file(ctx.generation_cache_path());
  cache.pop_back();
  cache.erase(cache.rfind('\n') + 1);  // drop the last record
  write_text_file(ctx.generation_cache_path(), cache);
  auto forbidden = std::make_shared<ForbiddenTransport>();
  ctx.chat_transport_factory = [&](const ProviderProfile&) { return forbidden; };
  const RunResult r = cmd_run(ctx, {dir / "corpus.jsonl", conds, ""});
  v.expect(r.failed == 1 && r.failures_by_class.count("ReplayMiss") == 1,
           fmt::format("{} failed cells in replay", r.failed));
  v.expect(r.generated == full.total_cells - 1, fmt::format("{} of {} replayed", r.generated, full.total_cells));
  v.expect(forbidden->calls == 0, "replay touched the provider");
  v.detail = fmt::format("429,429,200 -> success after {} retries, backoff {} ms then {} ms; one missing record -> "
                         "{} of {} cells failed ({})",
                         got.retries, slept.size() > 0 ? slept[0] : -1, slept.size() > 1 ? slept[1] : -1, r.failed,
                         r.total_cells, r.failures_by_class.empty() ? "-" : r.failures_by_class.begin()->first);
  fs::remove_all(rec_dir);
  fs::remove_all(dir);
  return v;
}

Verdict round_trips() {
  Verdict v;
  ::setenv("OPENAI_API_KEY", "acceptance", 1);
  const auto personas = synthetic_personas(25, 31337);
  int corpus_trips = 0;
  for (DataFormat f : {DataFormat::kCsv, DataFormat::kJsonl}) {
    const fs::path dir = temp_dir("acc-trip");
    export_corpus(personas, dir / ("original." + std::string(format_name(f))), f);
    CommandContext a;
    a.out_dir = dir / "a";
    const IngestResult first = cmd_ingest(a, dir / ("original." + std::string(format_name(f))));
    const auto loaded = load_corpus(first.corpus_path);
    export_corpus(loaded, dir / ("exported." + std::string(format_name(f))), f);
    CommandContext b;
    b.out_dir = dir / "b";
    const IngestResult second = cmd_ingest(b, dir / ("exported." + std::string(format_name(f))));
    v.expect(first.summary.accepted == personas.size() && first.summary.rejects.empty(), "ingest rejected rows");
    v.expect(loaded == personas, "ingested records differ from the originals");
    v.expect(read_text_file(first.corpus_path) == read_text_file(second.corpus_path),
             fmt::format("{} re-ingest differs", std::string(format_name(f))));
    ++corpus_trips;
    fs::remove_all(dir);
  }

  const fs::path rec_dir = temp_dir("acc-trip-rec");
  CommandContext rec = context_for(rec_dir, personas);
  rec.backend = Backend::kLive;
  auto echo = std::make_shared<ScriptedTransport>(echo_chat);
  rec.chat_transport_factory = [&](const ProviderProfile&) { return echo; };
  const RunResult recorded = cmd_run(rec, {rec_dir / "corpus.jsonl", all_conditions(), ""});
  const fs::path dir = temp_dir("acc-trip-replay");
  CommandContext ctx = context_for(dir, personas);
  copy_caches(rec, ctx);
  auto forbidden = std::make_shared<ForbiddenTransport>();
  ctx.chat_transport_factory = [&](const ProviderProfile&) { return forbidden; };
  const RunResult replayed = cmd_run(ctx, {dir / "corpus.jsonl", all_conditions(), ""});
  const auto a = RunStore(rec.out_dir).load_generations(recorded.run_id);
  const auto b = RunStore(ctx.out_dir).load_generations(replayed.run_id);
  v.expect(a.size() == b.size() && a.size() == recorded.total_cells, "generation counts differ");
  size_t identical = 0;
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    const bool same = a[i].persona_id == b[i].persona_id && a[i].condition == b[i].condition &&
                      a[i].question == b[i].question && a[i].record.cache_key == b[i].record.cache_key &&
                      a[i].record.messages == b[i].record.messages && a[i].record.config == b[i].record.config &&
                      a[i].record.response_text == b[i].record.response_text;
    if (same) ++identical;
  }
  v.expect(identical == a.size(), fmt::format("{} of {} generations reproduced", identical, a.size()));
  v.expect(cmd_export(rec, recorded.run_id, DataFormat::kJsonl) == cmd_export(ctx, replayed.run_id, DataFormat::kJsonl),
           "exported responses differ");
  v.expect(forbidden->calls == 0, "replay touched the provider");
  v.detail = fmt::format("{} corpus round trips content-identical, {} of {} generations replayed byte-exactly",
                         corpus_trips, identical, a.size());
  fs::remove_all(rec_dir);
  fs::remove_all(dir);
  return v;
}

// Records a traits evaluation against fake providers, replays it in a fresh
// directory and returns the replayed trait table. `predict` maps (persona
// index, trait, gold rating) to the rating the fake rater reports.
Table replayed_trait_table(const std::vector<PersonaRecord>& personas,
                           const std::function<int(size_t, BigFiveTrait, int)>& predict, const std::string& tag,
                           int* replay_calls) {
  const MappingTable& mapping = MappingTable::builtin();
  // Conditions whose prompts reveal gold answers, so the fake twin can tell
  // which persona it plays.
  const std::vector<Condition> conds = {Condition::persona_oracle(), Condition::few_shot_oracle(),
                                        Condition::persona_few_shot(QuestionDimension::kAnxiety)};
  auto whose = [&](const std::string& text) -> std::optional<size_t> {
    for (size_t i = 0; i < personas.size(); ++i) {
      const std::string tagged = "[" + personas[i].id + "]";
      if (text.find(tagged) != std::string::npos) return i;
      for (QuestionDimension q : kQuestionOrder) {
        if (text.find(*personas[i].gold_response(q)) != std::string::npos) return i;
      }
    }
    return std::nullopt;
  };
  auto provider = std::make_shared<ScriptedTransport>([&](const std::string&, const std::string& body) {
    const auto msgs = json::parse(body).at("messages");
    const auto who = whose(body);
    if (!who) return HttpResponse{200, chat_reply("No idea."), {}};
    if (msgs.at(0).at("content").get<std::string>() != mapping.trait_system_prompt) {
      return HttpResponse{200, chat_reply("[" + personas[*who].id + "] That is how I see it."), {}};
    }
    std::string reply = "My estimate:\n";
    for (BigFiveTrait t : kBigFiveOrder) {
      reply += fmt::format("{}: {}\n", label(t), predict(*who, t, personas[*who].psychological->rating(t)));
    }
    return HttpResponse{200, chat_reply(reply), {}};
  });
  const fs::path rec_dir = temp_dir("acc-traits-rec-" + tag);
  CommandContext rec = context_for(rec_dir, personas);
  rec.backend = Backend::kLive;
  rec.chat_transport_factory = [&](const ProviderProfile&) { return provider; };
  const RunResult r = cmd_run(rec, {rec_dir / "corpus.jsonl", conds, ""});
  cmd_eval_traits(rec, r.run_id);

  const fs::path dir = temp_dir("acc-traits-replay-" + tag);
  CommandContext ctx = context_for(dir, personas);
  copy_caches(rec, ctx);
  auto forbidden = std::make_shared<ForbiddenTransport>();
  ctx.chat_transport_factory = [&](const ProviderProfile&) { return forbidden; };
  cmd_run(ctx, {dir / "corpus.jsonl", conds, ""});
  Table t = cmd_eval_traits(ctx, r.run_id).report.tables.at(0);
  *replay_calls += forbidden->calls;
  fs::remove_all(rec_dir);
  fs::remove_all(dir);
  return t;
}

Verdict trait_plumbing() {
  Verdict v;
  ::setenv("OPENAI_API_KEY", "acceptance", 1);
  // Eight personas keep every mean a division by a power of two.
  const auto personas = synthetic_personas(8, 8080);
  int calls = 0;

  // Off by exactly one on every trait, toward the middle of the scale.
  const Table offset = replayed_trait_table(
      personas, [](size_t, BigFiveTrait, int g) { return g >= 3 ? g - 1 : g + 1; }, "offset", &calls);
  v.expect(offset.rows.size() == 3, fmt::format("{} groups in the offset table", offset.rows.size()));
  for (const auto& row : offset.rows) {
    for (size_t k = 0; k < row.cells.size(); ++k) {
      v.expect(row.cells[k].value == 1.0, fmt::format("offset {} {}: {}", row.label, offset.columns[k], row.cells[k].value));
    }
  }

  // Arbitrary known ratings; the expected MSE is summed by hand below.
  auto known = [](size_t i, BigFiveTrait t, int) { return static_cast<int>((i * 3 + static_cast<size_t>(t) * 2) % 5) + 1; };
  const Table varied = replayed_trait_table(personas, known, "varied", &calls);
  std::array<double, 5> expected{};
  for (size_t i = 0; i < personas.size(); ++i) {
    for (BigFiveTrait t : kBigFiveOrder) {
      const int d = known(i, t, 0) - personas[i].psychological->rating(t);
      expected[static_cast<size_t>(t)] += d * d;
    }
  }
  for (auto& e : expected) e /= static_cast<double>(personas.size());
  v.expect(varied.rows.size() == 3, fmt::format("{} groups in the varied table", varied.rows.size()));
  for (const auto& row : varied.rows) {
    for (size_t k = 0; k < row.cells.size(); ++k) {
      v.expect(row.cells[k].value == expected[k],
               fmt::format("varied {} {}: {} vs {}", row.label, varied.columns[k], row.cells[k].value, expected[k]));
    }
  }
  v.expect(calls == 0, fmt::format("{} provider calls during replay", calls));
  v.detail = fmt::format("constant offset -> MSE 1.0 on all 5 traits x 3 groups; known ratings -> MSE "
                         "[{:.4f}, {:.4f}, {:.4f}, {:.4f}, {:.4f}] exact; replay calls {}",
                         expected[0], expected[1], expected[2], expected[3], expected[4], calls);
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::string name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "condition matrix", condition_matrix},
      {2, "metric oracles", metric_oracles},
      {3, "fairness", fairness},
      {4, "lift arithmetic", lift_arithmetic},
      {5, "end-to-end replay", end_to_end_replay},
      {6, "gateway resilience", gateway_resilience},
      {7, "round trips", round_trips},
      {8, "trait-estimation plumbing", trait_plumbing},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.problems.push_back(std::string("exception: ") + e.what());
    }
    std::cout << fmt::format("[{}] {}. {}: {}", v.pass ? "PASS" : "FAIL", c.number, c.name, v.detail);
    for (const auto& p : v.problems) std::cout << " | " << p;
    std::cout << std::endl;
    if (!v.pass) ++failed;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
