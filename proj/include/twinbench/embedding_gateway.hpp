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

// Text to vector services with a content-addressed cache.

#ifndef TWINBENCH_EMBEDDING_GATEWAY_HPP_
#define TWINBENCH_EMBEDDING_GATEWAY_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "twinbench/embedding_vector.hpp"
#include "twinbench/error.hpp"
#include "twinbench/llm_gateway.hpp"
#include "twinbench/transport.hpp"

namespace twinbench {

// Model ids for the three evaluators used in the similarity tables.
inline constexpr std::string_view kBertClsModel = "bert-base-cls";
inline constexpr std::string_view kMiniLmModel = "all-MiniLM-L6-v2";
inline constexpr std::string_view kMpnetModel = "all-mpnet-base-v2";

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  // One vector per input text, same order.
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts,
                                                 const std::string& model_id) = 0;
};

// POST {model, input: [...]} to an OpenAI-compatible embeddings path.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::shared_ptr<Transport> transport, std::string path = "/v1/embeddings",
                        std::string api_key_env = "OPENAI_API_KEY");
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts,
                                         const std::string& model_id) override;

 private:
  std::shared_ptr<Transport> transport_;
  std::string path_;
  std::string api_key_env_;
};

// Lookup table read from JSONL lines {"text": ..., "vector": [...]} with an
// optional "model" restricting the entry to one model id. Unknown texts are
// a ProviderError.
class FixtureEmbeddingProvider : public EmbeddingProvider {
 public:
  FixtureEmbeddingProvider() = default;
  static FixtureEmbeddingProvider load(const std::filesystem::path& path);

  void add(const std::string& text, std::vector<double> vec,
           const std::optional<std::string>& model_id = std::nullopt);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts,
                                         const std::string& model_id) override;

 private:
  // (model or "", text) -> vector
  std::map<std::pair<std::string, std::string>, std::vector<double>> table_;
};

// Deterministic bag-of-words feature hashing over rouge_tokenize() tokens,
// seeded by the model id. A local stand-in for tests and offline demos; it
// carries no semantic knowledge.
class HashingEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashingEmbeddingProvider(int dims = 64);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts,
                                         const std::string& model_id) override;

 private:
  int dims_;
};

// Vectors keyed by sha256(model_id, text); optional append-only JSONL file.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path path);

  static std::string key(const std::string& model_id, const std::string& text);

  std::optional<EmbeddingVector> find(const std::string& model_id, const std::string& text) const;
  void put(const std::string& text, const EmbeddingVector& v);
  size_t size() const;

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, EmbeddingVector> table_;
};

struct EmbeddingOptions {
  // Replay serves only cached vectors and raises ReplayMiss otherwise.
  Backend backend = Backend::kLive;
  // Texts longer than this fail with TextTooLong instead of being truncated.
  std::optional<size_t> max_input_chars;
  size_t provider_batch_size = 32;
  int max_in_flight = 4;
};

class EmbeddingGateway {
 public:
  EmbeddingGateway(std::shared_ptr<EmbeddingProvider> provider,
                   std::shared_ptr<EmbeddingCache> cache, EmbeddingOptions options = {});

  // Throws EmptyText, TextTooLong, ReplayMiss or ProviderError.
  EmbeddingVector embed(const std::string& text, const std::string& model_id);

  // Input order preserved. Each distinct uncached text is sent to the
  // provider at most once.
  std::vector<Outcome<EmbeddingVector>> embed_batch(const std::vector<std::string>& texts,
                                                    const std::string& model_id,
                                                    int parallelism);

  const EmbeddingCache& cache() const { return *cache_; }

 private:
  std::optional<Failure> check_text(const std::string& text) const;
  void check_dims(const std::string& model_id, size_t dims);

  std::shared_ptr<EmbeddingProvider> provider_;
  std::shared_ptr<EmbeddingCache> cache_;
  EmbeddingOptions options_;
  FairLimiter limiter_;
  std::mutex dims_mu_;
  std::map<std::string, size_t> dims_;
};

}  // namespace twinbench

#endif  // TWINBENCH_EMBEDDING_GATEWAY_HPP_
