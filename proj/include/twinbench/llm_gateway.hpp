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

// Chat-completion client with retries, bounded concurrency and a
// content-addressed record/replay cache.

#ifndef TWINBENCH_LLM_GATEWAY_HPP_
#define TWINBENCH_LLM_GATEWAY_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "twinbench/chat.hpp"
#include "twinbench/error.hpp"
#include "twinbench/parallel.hpp"
#include "twinbench/transport.hpp"
#include "twinbench/twin.hpp"

namespace twinbench {

struct GenerationConfig {
  std::string model_id;
  double temperature = 0.6;
  double top_p = 1.0;
  int max_tokens = 200;
  int min_tokens = 0;
  std::optional<std::string> seed_note;

  // Throws Error(kInvalidArgument) when a bound is violated.
  void validate() const;

  bool operator==(const GenerationConfig&) const = default;
};

// Built-in profiles: "gpt-4o" and "llama-3-70b". Throws kUnknownEnumValue.
GenerationConfig default_profile(std::string_view name);

enum class Backend { kLive, kReplay };

std::string_view backend_name(Backend b);  // "live" / "replay"
Backend parse_backend(std::string_view s);

struct GenerationRecord {
  std::string cache_key;
  std::vector<ChatMessage> messages;
  GenerationConfig config;
  std::string response_text;
  int64_t latency_ms = 0;
  Backend backend = Backend::kLive;
  std::string timestamp;  // UTC, ISO 8601
  int retries = 0;
  std::vector<int64_t> backoff_ms;

  bool operator==(const GenerationRecord&) const = default;
};

void to_json(nlohmann::json& j, const ChatMessage& m);
void from_json(const nlohmann::json& j, ChatMessage& m);
void to_json(nlohmann::json& j, const GenerationConfig& c);
void from_json(const nlohmann::json& j, GenerationConfig& c);
void to_json(nlohmann::json& j, const GenerationRecord& r);
void from_json(const nlohmann::json& j, GenerationRecord& r);

// SHA-256 over a canonical serialization of the model, every config field
// and every message.
std::string cache_key(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg);

// Request body sent on the wire. min_tokens and seed_note are not part of
// the protocol and are left out.
nlohmann::json chat_request_body(const std::vector<ChatMessage>& messages,
                                 const GenerationConfig& cfg);

// Append-only JSONL store of GenerationRecords keyed by cache_key. Without a
// path it lives in memory only. Reads are concurrent; writes are serialized.
class GenerationCache {
 public:
  GenerationCache() = default;
  // Loads existing records. A torn final line (interrupted append) is
  // ignored. Throws Error(kUnreadableFile) on other malformed lines.
  explicit GenerationCache(std::filesystem::path path);

  std::optional<GenerationRecord> find(const std::string& key) const;
  // First record per key wins; later duplicates are ignored.
  void put(const GenerationRecord& r);

  size_t size() const;
  std::vector<GenerationRecord> records() const;  // insertion order
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::vector<GenerationRecord> records_;
  std::unordered_map<std::string, size_t> index_;
};

struct RetryPolicy {
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};

  // Delay before retry number `attempt` (1-based); non-decreasing.
  std::chrono::milliseconds delay(int attempt) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct GatewayOptions {
  Backend backend = Backend::kReplay;
  std::string chat_path = "/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  RetryPolicy retry;
  int max_in_flight = 4;
  Sleeper sleeper;  // defaults to std::this_thread::sleep_for
};

class LlmGateway {
 public:
  // transport may be null for the replay backend.
  LlmGateway(std::shared_ptr<Transport> transport, std::shared_ptr<GenerationCache> cache,
             GatewayOptions options);

  // Live: cache first, then the provider; new responses are persisted.
  // Replay: cache only, Error(kReplayMiss) otherwise. Records served from
  // the cache carry backend = Replay.
  GenerationRecord complete_record(const std::vector<ChatMessage>& messages,
                                   const GenerationConfig& cfg);
  std::string complete(const std::vector<ChatMessage>& messages, const GenerationConfig& cfg) {
    return complete_record(messages, cfg).response_text;
  }

  Backend backend() const { return options_.backend; }
  const GenerationCache& cache() const { return *cache_; }
  const FairLimiter& limiter() const { return limiter_; }

 private:
  GenerationRecord call_provider(const std::vector<ChatMessage>& messages,
                                 const GenerationConfig& cfg, const std::string& key);

  std::shared_ptr<Transport> transport_;
  std::shared_ptr<GenerationCache> cache_;
  GatewayOptions options_;
  FairLimiter limiter_;
};

struct GenerationPlan {
  TwinState twin;
  QuestionDimension target = QuestionDimension::kNumeracy;
};

// One outcome per plan, in input order.
std::vector<Outcome<GenerationRecord>> run_generation_batch(
    LlmGateway& gateway, const std::vector<GenerationPlan>& plans, const GenerationConfig& cfg,
    int parallelism, const MappingTable& mapping = MappingTable::builtin());

// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

}  // namespace twinbench

#endif  // TWINBENCH_LLM_GATEWAY_HPP_
