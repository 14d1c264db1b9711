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

// Declarative run configuration: provider profiles, embedding service,
// binarization policy and mapping table. Credentials never live here; only
// the names of the environment variables that hold them.

#ifndef TWINBENCH_CONFIG_HPP_
#define TWINBENCH_CONFIG_HPP_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twinbench/fairness.hpp"
#include "twinbench/llm_gateway.hpp"
#include "twinbench/mapping.hpp"

namespace twinbench {

struct ProviderProfile {
  std::string name;
  std::string base_url;
  std::string chat_path = "/v1/chat/completions";
  std::string api_key_env = "OPENAI_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int max_in_flight = 4;
  RetryPolicy retry;
  GenerationConfig generation;
};

enum class EmbeddingProviderKind { kHttp, kFixture, kHashing };

struct EmbeddingSettings {
  EmbeddingProviderKind provider = EmbeddingProviderKind::kHttp;
  std::string base_url = "http://127.0.0.1:8080";
  std::string path = "/v1/embeddings";
  std::string api_key_env = "EMBEDDING_API_KEY";
  std::chrono::milliseconds timeout{60000};
  std::string fixture_path;  // for kFixture
  int dims = 64;             // for kHashing
  std::vector<std::string> models;
  std::optional<size_t> max_input_chars;
  size_t batch_size = 32;
  int max_in_flight = 4;
};

struct Config {
  std::map<std::string, ProviderProfile> profiles;
  std::string default_profile = "gpt-4o";
  EmbeddingSettings embedding;
  BinarizationPolicy binarization;
  std::optional<std::string> mapping_path;

  // Built-in defaults: the two chat profiles and the three embedding model
  // ids, HTTP providers.
  static Config defaults();
  // Starts from defaults() and overrides what the document sets. Relative
  // file paths resolve against base_dir. Throws kSchemaMismatch.
  static Config from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static Config load(const std::filesystem::path& path);

  // Throws kUnknownEnumValue.
  const ProviderProfile& profile(const std::string& name) const;
  MappingTable mapping() const;
};

}  // namespace twinbench

#endif  // TWINBENCH_CONFIG_HPP_
