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

#include "twinbench/store.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "twinbench/csv.hpp"
#include "twinbench/hashing.hpp"

namespace twinbench {

using nlohmann::json;
namespace fs = std::filesystem;

DataFormat parse_format(std::string_view s) {
  if (s == "csv") return DataFormat::kCsv;
  if (s == "jsonl") return DataFormat::kJsonl;
  throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown format '{}'", s));
}

std::string_view format_name(DataFormat f) { return f == DataFormat::kCsv ? "csv" : "jsonl"; }

DataFormat format_from_path(const fs::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".csv") return DataFormat::kCsv;
  if (ext == ".jsonl" || ext == ".ndjson") return DataFormat::kJsonl;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("cannot infer format of '{}'; pass csv or jsonl explicitly", p.string()));
}

namespace {

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

std::string trim(std::string_view s) {
  const size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<RawRow> read_csv_rows(const fs::path& path) {
  const auto rows = read_csv_file(path);
  if (rows.empty()) throw Error(ErrorCode::kSchemaMismatch, path.string() + ": no header row");
  std::vector<std::string> header;
  for (const auto& h : rows[0]) header.push_back(trim(h));
  if (std::find(header.begin(), header.end(), "id") == header.end()) {
    throw Error(ErrorCode::kSchemaMismatch, path.string() + ": header has no 'id' column");
  }
  std::vector<RawRow> out;
  size_t n = 0;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && blank(row[0])) continue;
    RawRow raw;
    raw.row = ++n;
    if (row.size() != header.size()) {
      raw.failure = Failure{ErrorCode::kMalformedValue,
                            fmt::format("expected {} fields, found {}", header.size(), row.size())};
    } else {
      for (size_t c = 0; c < row.size(); ++c) {
        if (!row[c].empty()) raw.fields[header[c]] = row[c];
      }
    }
    out.push_back(std::move(raw));
  }
  return out;
}

std::vector<RawRow> read_jsonl_rows(const fs::path& path) {
  const std::string text = read_text_file(path);
  std::vector<RawRow> out;
  bool saw_id = false;
  size_t start = 0;
  size_t n = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string_view line(text.data() + start, end - start);
    start = end + 1;
    if (blank(line)) continue;
    RawRow raw;
    raw.row = ++n;
    try {
      const json j = json::parse(line);
      if (!j.is_object()) throw Error(ErrorCode::kMalformedValue, "line is not a JSON object");
      for (const auto& [k, v] : j.items()) {
        if (v.is_null()) continue;
        if (v.is_string()) {
          raw.fields[k] = v.get<std::string>();
        } else if (v.is_boolean()) {
          raw.fields[k] = v.get<bool>() ? "true" : "false";
        } else if (v.is_number_integer()) {
          raw.fields[k] = v.dump();
        } else if (v.is_number_float()) {
          raw.fields[k] = format_real(v.get<double>());
        } else {
          throw Error(ErrorCode::kMalformedValue, fmt::format("field '{}' is not a scalar", k));
        }
      }
      if (raw.fields.count("id") != 0 || j.contains("id")) saw_id = true;
    } catch (const Error& e) {
      raw.fields.clear();
      raw.failure = Failure{e.code(), e.what()};
    } catch (const std::exception& e) {
      raw.fields.clear();
      raw.failure = Failure{ErrorCode::kMalformedValue, e.what()};
    }
    out.push_back(std::move(raw));
  }
  if (!out.empty() && !saw_id) {
    throw Error(ErrorCode::kSchemaMismatch, path.string() + ": no line has an 'id' field");
  }
  return out;
}

json raw_json(const std::map<std::string, std::string>& raw) {
  json j = json::object();
  for (const auto& [k, v] : raw) j[k] = v;
  return j;
}

}  // namespace

std::vector<RawRow> read_raw_rows(const fs::path& path, DataFormat format) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kUnreadableFile, "cannot read " + path.string());
  return format == DataFormat::kCsv ? read_csv_rows(path) : read_jsonl_rows(path);
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot read " + path.string());
  Sha256 h;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h.update(std::string_view(buf.data(), static_cast<size_t>(in.gcount())));
  }
  return h.hex_digest();
}

std::string corpus_jsonl(const std::vector<PersonaRecord>& records) {
  std::string out;
  for (const auto& r : records) out += raw_json(to_raw(r)).dump() + "\n";
  return out;
}

CorpusSummary ingest(const fs::path& input, DataFormat format, const fs::path& out_dir) {
  const auto rows = read_raw_rows(input, format);
  CorpusSummary s;
  s.input_rows = rows.size();

  std::set<std::string> known(schema_columns().begin(), schema_columns().end());
  std::set<std::string> ignored;
  std::set<std::string> seen_ids;
  std::vector<PersonaRecord> accepted;
  for (const auto& raw : rows) {
    auto reject = [&](ErrorCode code, const std::string& msg) {
      s.rejects.push_back({raw.row, code, msg});
      ++s.rejects_by_class[std::string(error_code_name(code))];
    };
    if (raw.failure) {
      reject(raw.failure->code, raw.failure->message);
      continue;
    }
    for (const auto& [k, v] : raw.fields) {
      if (known.count(k) == 0 && k.rfind(field::kScorePrefix, 0) != 0) ignored.insert(k);
    }
    try {
      PersonaRecord r = normalize_record(raw.fields);
      if (!seen_ids.insert(r.id).second) {
        reject(ErrorCode::kInvalidArgument, fmt::format("duplicate id '{}'", r.id));
        continue;
      }
      accepted.push_back(std::move(r));
    } catch (const Error& e) {
      reject(e.code(), e.what());
    }
  }
  s.accepted = accepted.size();
  s.ignored_columns.assign(ignored.begin(), ignored.end());

  std::string rejects;
  for (const auto& r : s.rejects) {
    rejects += json{{"row", r.row}, {"class", error_code_name(r.code)}, {"message", r.message}}.dump() + "\n";
  }
  write_text_file(out_dir / "corpus.jsonl", corpus_jsonl(accepted));
  write_text_file(out_dir / "rejects.jsonl", rejects);
  s.corpus_hash = file_sha256(out_dir / "corpus.jsonl");
  return s;
}

std::vector<PersonaRecord> load_corpus(const fs::path& path) {
  const auto rows = read_raw_rows(path, DataFormat::kJsonl);
  std::vector<PersonaRecord> out;
  for (const auto& raw : rows) {
    try {
      if (raw.failure) throw Error(raw.failure->code, raw.failure->message);
      out.push_back(normalize_record(raw.fields));
    } catch (const Error& e) {
      throw Error(ErrorCode::kUnreadableFile,
                  fmt::format("{}: record {}: {}", path.string(), raw.row, e.what()));
    }
  }
  return out;
}

void export_corpus(const std::vector<PersonaRecord>& records, const fs::path& path,
                   DataFormat format) {
  if (format == DataFormat::kJsonl) {
    write_text_file(path, corpus_jsonl(records));
    return;
  }
  std::vector<std::string> columns = schema_columns();
  std::set<std::string> scores;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.gold_scores) scores.insert(std::string(field::kScorePrefix) + k);
  }
  columns.insert(columns.end(), scores.begin(), scores.end());
  std::string out = csv_line(columns);
  for (const auto& r : records) {
    const auto raw = to_raw(r);
    CsvRow row;
    for (const auto& c : columns) {
      auto it = raw.find(c);
      row.push_back(it == raw.end() ? "" : it->second);
    }
    out += csv_line(row);
  }
  write_text_file(path, out);
}

std::string cell_key(const std::string& persona_id, const Condition& c, QuestionDimension q) {
  return persona_id + "|" + c.id() + "|" + std::string(question_name(q));
}

std::string_view run_status_name(RunStatus s) {
  switch (s) {
    case RunStatus::kPending: return "pending";
    case RunStatus::kRunning: return "running";
    case RunStatus::kComplete: return "complete";
    case RunStatus::kPartial: return "partial";
  }
  return "?";
}

namespace {

RunStatus parse_run_status(std::string_view s) {
  for (auto v : {RunStatus::kPending, RunStatus::kRunning, RunStatus::kComplete, RunStatus::kPartial}) {
    if (run_status_name(v) == s) return v;
  }
  throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown run status '{}'", s));
}

json condition_ids(const std::vector<Condition>& cs) {
  json arr = json::array();
  for (const auto& c : cs) arr.push_back(c.id());
  return arr;
}

}  // namespace

json RunManifest::to_json() const {
  return json{{"run_id", run_id},
              {"corpus_path", corpus_path},
              {"corpus_hash", corpus_hash},
              {"conditions", condition_ids(conditions)},
              {"profile", profile},
              {"config", config},
              {"mapping_version", mapping_version},
              {"backend", backend_name(backend)},
              {"created_at", created_at},
              {"status", run_status_name(status)},
              {"cells", cells}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.corpus_path = j.value("corpus_path", std::string());
    m.corpus_hash = j.at("corpus_hash").get<std::string>();
    for (const auto& c : j.at("conditions")) m.conditions.push_back(parse_condition(c.get<std::string>()));
    m.profile = j.value("profile", std::string());
    m.config = j.at("config").get<GenerationConfig>();
    m.mapping_version = j.value("mapping_version", std::string());
    m.backend = parse_backend(j.value("backend", std::string("replay")));
    m.created_at = j.value("created_at", std::string());
    m.status = parse_run_status(j.value("status", std::string("pending")));
    m.cells = j.value("cells", std::map<std::string, std::string>{});
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, fmt::format("manifest: {}", e.what()));
  }
  return m;
}

std::string derive_run_id(const std::string& corpus_hash, const std::vector<Condition>& conditions,
                          const GenerationConfig& config, const std::string& mapping_version) {
  const json basis = {{"corpus_hash", corpus_hash},
                      {"conditions", condition_ids(conditions)},
                      {"config", config},
                      {"mapping_version", mapping_version}};
  return "run-" + sha256_hex(basis.dump()).substr(0, 16);
}

json entry_to_json(const GenerationEntry& e) {
  return json{{"persona_id", e.persona_id},
              {"condition", e.condition.id()},
              {"question", question_name(e.question)},
              {"record", e.record}};
}

GenerationEntry entry_from_json(const json& j) {
  GenerationEntry e;
  e.persona_id = j.at("persona_id").get<std::string>();
  e.condition = parse_condition(j.at("condition").get<std::string>());
  e.question = parse_question(j.at("question").get<std::string>());
  e.record = j.at("record").get<GenerationRecord>();
  return e;
}

void sort_entries(std::vector<GenerationEntry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.persona_id != b.persona_id) return a.persona_id < b.persona_id;
    if (a.condition.index() != b.condition.index()) return a.condition.index() < b.condition.index();
    return static_cast<int>(a.question) < static_cast<int>(b.question);
  });
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {}

fs::path RunStore::run_dir(const std::string& run_id) const { return root_ / "runs" / run_id; }

bool RunStore::exists(const std::string& run_id) const {
  return !run_id.empty() && run_id.find('/') == std::string::npos &&
         fs::is_regular_file(run_dir(run_id) / "manifest.json");
}

std::vector<std::string> RunStore::list_runs() const {
  std::vector<std::string> out;
  const fs::path dir = root_ / "runs";
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (fs::is_regular_file(e.path() / "manifest.json")) out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void RunStore::require(const std::string& run_id) const {
  if (!exists(run_id)) throw Error(ErrorCode::kUnknownRun, fmt::format("unknown run '{}'", run_id));
}

void RunStore::create(const RunManifest& m) {
  fs::create_directories(run_dir(m.run_id));
  save_manifest(m);
}

RunManifest RunStore::load_manifest(const std::string& run_id) const {
  require(run_id);
  try {
    return RunManifest::from_json(json::parse(read_text_file(run_dir(run_id) / "manifest.json")));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, fmt::format("manifest of {}: {}", run_id, e.what()));
  }
}

void RunStore::save_manifest(const RunManifest& m) {
  std::lock_guard lock(write_mu_);
  write_text_file(run_dir(m.run_id) / "manifest.json", m.to_json().dump(2) + "\n");
}

void RunStore::append_line(const fs::path& p, const std::string& line) {
  std::lock_guard lock(write_mu_);
  std::ofstream out(p, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot append to " + p.string());
  // One write call per record keeps appends whole.
  const std::string buf = line + "\n";
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
}

void RunStore::save_generation(const std::string& run_id, const GenerationEntry& e) {
  require(run_id);
  append_line(run_dir(run_id) / "generations.jsonl", entry_to_json(e).dump());
}

namespace {

std::vector<json> read_jsonl_objects(const fs::path& p) {
  std::vector<json> out;
  std::ifstream in(p);
  if (!in) return out;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  for (size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    try {
      out.push_back(json::parse(lines[i]));
    } catch (const json::exception& e) {
      if (i + 1 == lines.size()) break;  // torn final append
      throw Error(ErrorCode::kUnreadableFile, fmt::format("{}:{}: {}", p.string(), i + 1, e.what()));
    }
  }
  return out;
}

}  // namespace

std::vector<GenerationEntry> RunStore::load_generations(const std::string& run_id,
                                                        const GenerationFilter& filter) const {
  require(run_id);
  std::vector<GenerationEntry> out;
  std::set<std::string> seen;
  const fs::path p = run_dir(run_id) / "generations.jsonl";
  for (const auto& j : read_jsonl_objects(p)) {
    GenerationEntry e;
    try {
      e = entry_from_json(j);
    } catch (const std::exception& ex) {
      throw Error(ErrorCode::kUnreadableFile, fmt::format("{}: bad entry: {}", p.string(), ex.what()));
    }
    if (!seen.insert(cell_key(e.persona_id, e.condition, e.question)).second) continue;
    if (filter.persona_id && e.persona_id != *filter.persona_id) continue;
    if (filter.condition && e.condition != *filter.condition) continue;
    if (filter.question && e.question != *filter.question) continue;
    out.push_back(std::move(e));
  }
  sort_entries(out);
  return out;
}

void RunStore::save_evaluation(const std::string& run_id, const json& row) {
  require(run_id);
  append_line(run_dir(run_id) / "evaluations.jsonl", row.dump());
}

std::vector<json> RunStore::load_evaluations(const std::string& run_id) const {
  require(run_id);
  return read_jsonl_objects(run_dir(run_id) / "evaluations.jsonl");
}

std::vector<ResponseRow> response_rows(const std::vector<GenerationEntry>& entries,
                                       const std::map<std::string, PersonaRecord>& corpus) {
  std::vector<ResponseRow> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    ResponseRow r{e.persona_id, e.condition.id(), std::string(question_name(e.question)),
                  e.record.response_text, ""};
    if (auto it = corpus.find(e.persona_id); it != corpus.end()) {
      if (const std::string* g = it->second.gold_response(e.question)) r.gold_text = *g;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string render_responses(const std::vector<ResponseRow>& rows, DataFormat format) {
  std::string out;
  if (format == DataFormat::kCsv) {
    out = csv_line(kResponseColumns);
    for (const auto& r : rows) {
      out += csv_line({r.persona_id, r.condition, r.question, r.generated_text, r.gold_text});
    }
    return out;
  }
  for (const auto& r : rows) {
    out += json{{"persona_id", r.persona_id},
                {"condition", r.condition},
                {"question", r.question},
                {"generated_text", r.generated_text},
                {"gold_text", r.gold_text}}
               .dump() +
           "\n";
  }
  return out;
}

std::vector<ResponseRow> import_responses(const fs::path& path, DataFormat format) {
  std::vector<ResponseRow> out;
  if (format == DataFormat::kCsv) {
    const auto rows = read_csv_file(path);
    if (rows.empty() || rows[0] != kResponseColumns) {
      throw Error(ErrorCode::kSchemaMismatch, path.string() + ": unexpected response header");
    }
    for (size_t i = 1; i < rows.size(); ++i) {
      const auto& r = rows[i];
      if (r.size() != kResponseColumns.size()) {
        throw Error(ErrorCode::kSchemaMismatch, fmt::format("{}: row {} has {} fields", path.string(), i + 1, r.size()));
      }
      out.push_back({r[0], r[1], r[2], r[3], r[4]});
    }
    return out;
  }
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kUnreadableFile, "cannot read " + path.string());
  for (const auto& j : read_jsonl_objects(path)) {
    try {
      out.push_back({j.at("persona_id").get<std::string>(), j.at("condition").get<std::string>(),
                     j.at("question").get<std::string>(), j.at("generated_text").get<std::string>(),
                     j.at("gold_text").get<std::string>()});
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchemaMismatch, fmt::format("{}: {}", path.string(), e.what()));
    }
  }
  return out;
}

}  // namespace twinbench
