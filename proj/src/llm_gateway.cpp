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

#include "twinbench/llm_gateway.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <thread>

#include "twinbench/hashing.hpp"

namespace twinbench {

using nlohmann::json;

void GenerationConfig::validate() const {
  if (model_id.empty()) throw Error(ErrorCode::kInvalidArgument, "config: model_id is empty");
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("config: temperature {} not in [0, 2]", temperature));
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("config: top_p {} not in (0, 1]", top_p));
  }
  if (min_tokens < 0 || max_tokens < min_tokens) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("config: need max_tokens >= min_tokens >= 0, got {} and {}",
                            max_tokens, min_tokens));
  }
}

GenerationConfig default_profile(std::string_view name) {
  GenerationConfig c;
  c.temperature = 0.6;
  c.max_tokens = 200;
  c.min_tokens = 0;
  if (name == "gpt-4o") {
    c.model_id = "gpt-4o";
    c.top_p = 1.0;
  } else if (name == "llama-3-70b") {
    c.model_id = "llama-3-70b";
    c.top_p = 0.9;
  } else {
    throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown model profile '{}'", name));
  }
  return c;
}

std::string_view backend_name(Backend b) { return b == Backend::kLive ? "live" : "replay"; }

Backend parse_backend(std::string_view s) {
  if (s == "live") return Backend::kLive;
  if (s == "replay") return Backend::kReplay;
  throw Error(ErrorCode::kUnknownEnumValue, fmt::format("unknown backend '{}'", s));
}

void to_json(json& j, const ChatMessage& m) { j = json{{"role", m.role}, {"content", m.content}}; }

void from_json(const json& j, ChatMessage& m) {
  m.role = j.at("role").get<std::string>();
  m.content = j.at("content").get<std::string>();
}

void to_json(json& j, const GenerationConfig& c) {
  j = json{{"model_id", c.model_id},     {"temperature", c.temperature},
           {"top_p", c.top_p},           {"max_tokens", c.max_tokens},
           {"min_tokens", c.min_tokens}, {"seed_note", nullptr}};
  if (c.seed_note) j["seed_note"] = *c.seed_note;
}

void from_json(const json& j, GenerationConfig& c) {
  c.model_id = j.at("model_id").get<std::string>();
  c.temperature = j.at("temperature").get<double>();
  c.top_p = j.at("top_p").get<double>();
  c.max_tokens = j.at("max_tokens").get<int>();
  c.min_tokens = j.value("min_tokens", 0);
  c.seed_note.reset();
  if (j.contains("seed_note") && !j["seed_note"].is_null()) c.seed_note = j["seed_note"].get<std::string>();
}

void to_json(json& j, const GenerationRecord& r) {
  j = json{{"cache_key", r.cache_key},
           {"request", {{"messages", r.messages}, {"config", r.config}}},
           {"response_text", r.response_text},
           {"latency_ms", r.latency_ms},
           {"backend", backend_name(r.backend)},
           {"timestamp", r.timestamp},
           {"retries", r.retries},
           {"backoff_ms", r.backoff_ms}};
}

void from_json(const json& j, GenerationRecord& r) {
  r.cache_key = j.at("cache_key").get<std::string>();
  r.messages = j.at("request").at("messages").get<std::vector<ChatMessage>>();
  r.config = j.at("request").at("config").get<GenerationConfig>();
  r.response_text = j.at("response_text").get<std::string>();
  r.latency_ms = j.value("latency_ms", int64_t{0});
  r.backend = parse_backend(j.value("backend", std::string("live")));
  r.timestamp = j.value("timestamp", std::string());
  r.retries = j.value("retries", 0);
  r.backoff_ms = j.value("backoff_ms", std::vector<int64_t>{});
}

std::string cache_key(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg) {
  // Object keys serialize sorted, so the dump is canonical.
  const json canonical = {{"model", cfg.model_id}, {"config", cfg}, {"messages", messages}};
  return sha256_hex(canonical.dump());
}

json chat_request_body(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg) {
  return json{{"model", cfg.model_id},
              {"messages", messages},
              {"temperature", cfg.temperature},
              {"top_p", cfg.top_p},
              {"max_tokens", cfg.max_tokens}};
}

GenerationCache::GenerationCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;  // created on first put
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    GenerationRecord r;
    try {
      r = json::parse(lines[i]).get<GenerationRecord>();
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) break;
      throw Error(ErrorCode::kUnreadableFile,
                  fmt::format("{}:{}: bad cache record: {}", path_->string(), i + 1, e.what()));
    }
    if (index_.emplace(r.cache_key, records_.size()).second) records_.push_back(std::move(r));
  }
}

std::optional<GenerationRecord> GenerationCache::find(const std::string& key) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return records_[it->second];
}

void GenerationCache::put(const GenerationRecord& r) {
  std::unique_lock lock(mu_);
  if (index_.count(r.cache_key) != 0) return;
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot append to " + path_->string());
    out << json(r).dump() << '\n';
    out.flush();
  }
  index_.emplace(r.cache_key, records_.size());
  records_.push_back(r);
}

size_t GenerationCache::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::vector<GenerationRecord> GenerationCache::records() const {
  std::shared_lock lock(mu_);
  return records_;
}

std::chrono::milliseconds RetryPolicy::delay(int attempt) const {
  const double raw = static_cast<double>(initial_backoff.count()) *
                     std::pow(multiplier, std::max(0, attempt - 1));
  const double capped = std::min(raw, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<int64_t>(capped));
}

LlmGateway::LlmGateway(std::shared_ptr<Transport> transport,
                       std::shared_ptr<GenerationCache> cache, GatewayOptions options)
    : transport_(std::move(transport)),
      cache_(cache ? std::move(cache) : std::make_shared<GenerationCache>()),
      options_(std::move(options)),
      limiter_(options_.max_in_flight) {
  if (!options_.sleeper) {
    options_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (options_.retry.max_retries < 0 || options_.retry.multiplier < 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "retry policy: need max_retries >= 0, multiplier >= 1");
  }
}

GenerationRecord LlmGateway::complete_record(const std::vector<ChatMessage>& messages,
                                             const GenerationConfig& cfg) {
  if (messages.empty()) throw Error(ErrorCode::kInvalidArgument, "complete: empty message list");
  cfg.validate();
  const std::string key = cache_key(messages, cfg);
  if (auto hit = cache_->find(key)) {
    hit->backend = Backend::kReplay;
    return *hit;
  }
  if (options_.backend == Backend::kReplay) {
    throw Error(ErrorCode::kReplayMiss, "no cached generation for key " + key);
  }
  GenerationRecord r = call_provider(messages, cfg, key);
  cache_->put(r);
  return r;
}

GenerationRecord LlmGateway::call_provider(const std::vector<ChatMessage>& messages,
                                           const GenerationConfig& cfg, const std::string& key) {
  if (!transport_) throw Error(ErrorCode::kProviderError, "live backend has no transport");
  const char* token = std::getenv(options_.api_key_env.c_str());
  if (token == nullptr || *token == '\0') {
    throw Error(ErrorCode::kProviderError,
                fmt::format("credentials missing: set {}", options_.api_key_env));
  }
  const std::map<std::string, std::string> headers = {
      {"Authorization", std::string("Bearer ") + token}};
  const std::string body = chat_request_body(messages, cfg).dump();

  GenerationRecord r;
  r.cache_key = key;
  r.messages = messages;
  r.config = cfg;
  r.backend = Backend::kLive;

  for (int attempt = 0;; ++attempt) {
    HttpResponse res;
    const auto start = std::chrono::steady_clock::now();
    {
      FairLimiter::Permit permit(limiter_);
      res = transport_->post_json(options_.chat_path, body, headers);
    }
    r.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    if (res.status == 429) {
      if (attempt >= options_.retry.max_retries) {
        throw Error(ErrorCode::kRateLimited,
                    fmt::format("rate limited after {} retries", attempt));
      }
      const auto d = options_.retry.delay(attempt + 1);
      r.backoff_ms.push_back(d.count());
      r.retries = attempt + 1;
      options_.sleeper(d);
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      throw Error(ErrorCode::kProviderError,
                  fmt::format("provider returned HTTP {}: {}", res.status, res.body.substr(0, 200)));
    }
    try {
      const json j = json::parse(res.body);
      r.response_text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kProviderError, fmt::format("malformed provider response: {}", e.what()));
    }
    r.timestamp = utc_timestamp();
    return r;
  }
}

std::vector<Outcome<GenerationRecord>> run_generation_batch(
    LlmGateway& gateway, const std::vector<GenerationPlan>& plans, const GenerationConfig& cfg,
    int parallelism, const MappingTable& mapping) {
  if (parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  std::vector<Outcome<GenerationRecord>> out(plans.size());
  parallel_for(plans.size(), parallelism, [&](size_t i) {
    try {
      const auto messages = build_chat_messages(plans[i].twin, plans[i].target, mapping);
      out[i].value = gateway.complete_record(messages, cfg);
    } catch (const Error& e) {
      out[i].failure = Failure{e.code(), e.what()};
    } catch (const std::exception& e) {
      out[i].failure = Failure{ErrorCode::kProviderError, e.what()};
    }
  });
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", tm);
}

}  // namespace twinbench
