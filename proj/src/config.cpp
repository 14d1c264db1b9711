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

#include "twinbench/config.hpp"

#include <fmt/format.h>

#include "twinbench/csv.hpp"
#include "twinbench/embedding_gateway.hpp"
#include "twinbench/error.hpp"

namespace twinbench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ProviderProfile builtin_profile(const std::string& name, const std::string& base_url) {
  ProviderProfile p;
  p.name = name;
  p.base_url = base_url;
  p.generation = default_profile(name);
  return p;
}

std::string resolve(const std::string& p, const fs::path& base) {
  if (p.empty() || fs::path(p).is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal().string();
}

void apply_profile(ProviderProfile& p, const json& j) {
  p.base_url = j.value("base_url", p.base_url);
  p.chat_path = j.value("chat_path", p.chat_path);
  p.api_key_env = j.value("api_key_env", p.api_key_env);
  if (j.contains("timeout_ms")) p.timeout = std::chrono::milliseconds(j["timeout_ms"].get<int64_t>());
  p.max_in_flight = j.value("max_in_flight", p.max_in_flight);
  auto& g = p.generation;
  g.model_id = j.value("model_id", g.model_id);
  g.temperature = j.value("temperature", g.temperature);
  g.top_p = j.value("top_p", g.top_p);
  g.max_tokens = j.value("max_tokens", g.max_tokens);
  g.min_tokens = j.value("min_tokens", g.min_tokens);
  if (j.contains("seed_note") && !j["seed_note"].is_null()) g.seed_note = j["seed_note"].get<std::string>();
  if (j.contains("retry")) {
    const auto& r = j["retry"];
    p.retry.max_retries = r.value("max_retries", p.retry.max_retries);
    if (r.contains("initial_backoff_ms")) {
      p.retry.initial_backoff = std::chrono::milliseconds(r["initial_backoff_ms"].get<int64_t>());
    }
    p.retry.multiplier = r.value("multiplier", p.retry.multiplier);
    if (r.contains("max_backoff_ms")) {
      p.retry.max_backoff = std::chrono::milliseconds(r["max_backoff_ms"].get<int64_t>());
    }
  }
  if (g.model_id.empty()) g.model_id = p.name;
  g.validate();
}

EmbeddingProviderKind parse_provider_kind(const std::string& s) {
  if (s == "http") return EmbeddingProviderKind::kHttp;
  if (s == "fixture") return EmbeddingProviderKind::kFixture;
  if (s == "hashing") return EmbeddingProviderKind::kHashing;
  throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown embedding provider '{}'", s));
}

}  // namespace

Config Config::defaults() {
  Config c;
  c.profiles.emplace("gpt-4o", builtin_profile("gpt-4o", "https://api.openai.com"));
  c.profiles.emplace("llama-3-70b", builtin_profile("llama-3-70b", "http://127.0.0.1:8000"));
  c.embedding.models = {std::string(kBertClsModel), std::string(kMiniLmModel),
                        std::string(kMpnetModel)};
  return c;
}

Config Config::from_json(const json& j, const fs::path& base_dir) {
  Config c = defaults();
  try {
    if (j.contains("profiles")) {
      for (const auto& [name, pj] : j["profiles"].items()) {
        auto it = c.profiles.find(name);
        if (it == c.profiles.end()) {
          ProviderProfile p;
          p.name = name;
          p.generation.model_id = name;
          it = c.profiles.emplace(name, p).first;
        }
        apply_profile(it->second, pj);
      }
    }
    c.default_profile = j.value("default_profile", c.default_profile);
    if (j.contains("embedding")) {
      const auto& e = j["embedding"];
      auto& s = c.embedding;
      if (e.contains("provider")) s.provider = parse_provider_kind(e["provider"].get<std::string>());
      s.base_url = e.value("base_url", s.base_url);
      s.path = e.value("path", s.path);
      s.api_key_env = e.value("api_key_env", s.api_key_env);
      if (e.contains("timeout_ms")) s.timeout = std::chrono::milliseconds(e["timeout_ms"].get<int64_t>());
      s.fixture_path = resolve(e.value("fixture_path", s.fixture_path), base_dir);
      s.dims = e.value("dims", s.dims);
      if (e.contains("models")) s.models = e["models"].get<std::vector<std::string>>();
      if (e.contains("max_input_chars") && !e["max_input_chars"].is_null()) {
        s.max_input_chars = e["max_input_chars"].get<size_t>();
      }
      s.batch_size = e.value("batch_size", s.batch_size);
      s.max_in_flight = e.value("max_in_flight", s.max_in_flight);
    }
    if (j.contains("binarization")) c.binarization = BinarizationPolicy::from_json(j["binarization"]);
    if (j.contains("mapping_path") && !j["mapping_path"].is_null()) {
      c.mapping_path = resolve(j["mapping_path"].get<std::string>(), base_dir);
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, fmt::format("config: {}", e.what()));
  }
  if (c.embedding.models.empty()) throw Error(ErrorCode::kSchemaMismatch, "config: no embedding models");
  return c;
}

Config Config::load(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, fmt::format("{}: {}", path.string(), e.what()));
  }
  return from_json(j, path.parent_path());
}

const ProviderProfile& Config::profile(const std::string& name) const {
  auto it = profiles.find(name);
  if (it == profiles.end()) {
    throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown provider profile '{}'", name));
  }
  return it->second;
}

MappingTable Config::mapping() const {
  return mapping_path ? MappingTable::load(*mapping_path) : MappingTable::builtin();
}

}  // namespace twinbench
