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

#include "twinbench/embedding_gateway.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <mutex>

#include "twinbench/hashing.hpp"
#include "twinbench/metrics.hpp"

namespace twinbench {

using nlohmann::json;

HttpEmbeddingProvider::HttpEmbeddingProvider(std::shared_ptr<Transport> transport, std::string path,
                                             std::string api_key_env)
    : transport_(std::move(transport)), path_(std::move(path)), api_key_env_(std::move(api_key_env)) {}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed(const std::vector<std::string>& texts,
                                                              const std::string& model_id) {
  std::map<std::string, std::string> headers;
  if (const char* token = std::getenv(api_key_env_.c_str()); token != nullptr && *token != '\0') {
    headers["Authorization"] = std::string("Bearer ") + token;
  }
  const json body = {{"model", model_id}, {"input", texts}};
  const HttpResponse res = transport_->post_json(path_, body.dump(), headers);
  if (res.status < 200 || res.status >= 300) {
    throw Error(ErrorCode::kProviderError,
                fmt::format("embeddings: HTTP {}: {}", res.status, res.body.substr(0, 200)));
  }
  std::vector<std::vector<double>> out(texts.size());
  try {
    const json j = json::parse(res.body);
    const auto& data = j.at("data");
    if (data.size() != texts.size()) {
      throw Error(ErrorCode::kProviderError,
                  fmt::format("embeddings: {} vectors for {} inputs", data.size(), texts.size()));
    }
    for (size_t i = 0; i < data.size(); ++i) {
      const size_t idx = data[i].value("index", i);
      if (idx >= out.size()) throw Error(ErrorCode::kProviderError, "embeddings: bad index");
      out[idx] = data[i].at("embedding").get<std::vector<double>>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kProviderError, fmt::format("embeddings: malformed response: {}", e.what()));
  }
  return out;
}

FixtureEmbeddingProvider FixtureEmbeddingProvider::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot read " + path.string());
  FixtureEmbeddingProvider p;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      std::optional<std::string> model;
      if (j.contains("model")) model = j["model"].get<std::string>();
      p.add(j.at("text").get<std::string>(), j.at("vector").get<std::vector<double>>(), model);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kUnreadableFile,
                  fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
  }
  return p;
}

void FixtureEmbeddingProvider::add(const std::string& text, std::vector<double> vec,
                                   const std::optional<std::string>& model_id) {
  table_[{model_id.value_or(""), text}] = std::move(vec);
}

std::vector<std::vector<double>> FixtureEmbeddingProvider::embed(
    const std::vector<std::string>& texts, const std::string& model_id) {
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = table_.find({model_id, t});
    if (it == table_.end()) it = table_.find({"", t});
    if (it == table_.end()) {
      throw Error(ErrorCode::kProviderError,
                  fmt::format("fixture has no vector for '{}'", t.substr(0, 60)));
    }
    out.push_back(it->second);
  }
  return out;
}

namespace {

uint64_t fnv1a(std::string_view s, uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

HashingEmbeddingProvider::HashingEmbeddingProvider(int dims) : dims_(dims) {
  if (dims < 2) throw Error(ErrorCode::kInvalidArgument, "hashing embedder needs dims >= 2");
}

std::vector<std::vector<double>> HashingEmbeddingProvider::embed(
    const std::vector<std::string>& texts, const std::string& model_id) {
  const uint64_t seed = fnv1a(model_id);
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::vector<double> v(static_cast<size_t>(dims_), 0.0);
    auto tokens = rouge_tokenize(t);
    if (tokens.empty()) tokens.push_back(t);
    for (const auto& tok : tokens) {
      const uint64_t h = fnv1a(tok, seed);
      v[h % static_cast<uint64_t>(dims_)] += (h >> 63) != 0 ? -1.0 : 1.0;
    }
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  if (!in) return;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  for (size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const json j = json::parse(lines[i]);
      table_.emplace(j.at("key").get<std::string>(),
                     EmbeddingVector(j.at("model").get<std::string>(),
                                     j.at("vector").get<std::vector<double>>()));
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) break;  // torn final append
      throw Error(ErrorCode::kUnreadableFile,
                  fmt::format("{}:{}: bad embedding record: {}", path_->string(), i + 1, e.what()));
    }
  }
}

std::string EmbeddingCache::key(const std::string& model_id, const std::string& text) {
  Sha256 h;
  h.update(model_id);
  h.update(std::string_view("\0", 1));
  h.update(text);
  return h.hex_digest();
}

std::optional<EmbeddingVector> EmbeddingCache::find(const std::string& model_id,
                                                    const std::string& text) const {
  std::shared_lock lock(mu_);
  auto it = table_.find(key(model_id, text));
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

void EmbeddingCache::put(const std::string& text, const EmbeddingVector& v) {
  const std::string k = key(v.model_id(), text);
  std::unique_lock lock(mu_);
  if (table_.count(k) != 0) return;
  if (path_) {
    if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (!out) throw Error(ErrorCode::kUnreadableFile, "cannot append to " + path_->string());
    // Vectors are written with round-trip precision so reloads are bit-stable.
    out << json{{"key", k}, {"model", v.model_id()}, {"vector", v.values()}}.dump() << '\n';
  }
  table_.emplace(k, v);
}

size_t EmbeddingCache::size() const {
  std::shared_lock lock(mu_);
  return table_.size();
}

EmbeddingGateway::EmbeddingGateway(std::shared_ptr<EmbeddingProvider> provider,
                                   std::shared_ptr<EmbeddingCache> cache, EmbeddingOptions options)
    : provider_(std::move(provider)),
      cache_(cache ? std::move(cache) : std::make_shared<EmbeddingCache>()),
      options_(options),
      limiter_(options.max_in_flight) {
  if (options_.provider_batch_size == 0) options_.provider_batch_size = 1;
}

std::optional<Failure> EmbeddingGateway::check_text(const std::string& text) const {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return Failure{ErrorCode::kEmptyText, "cannot embed empty text"};
  }
  if (options_.max_input_chars && text.size() > *options_.max_input_chars) {
    return Failure{ErrorCode::kTextTooLong,
                   fmt::format("text of {} chars exceeds limit {}", text.size(),
                               *options_.max_input_chars)};
  }
  return std::nullopt;
}

void EmbeddingGateway::check_dims(const std::string& model_id, size_t dims) {
  std::lock_guard lock(dims_mu_);
  auto [it, inserted] = dims_.emplace(model_id, dims);
  if (!inserted && it->second != dims) {
    throw Error(ErrorCode::kProviderError,
                fmt::format("model {} returned {} dims, expected {}", model_id, dims, it->second));
  }
}

EmbeddingVector EmbeddingGateway::embed(const std::string& text, const std::string& model_id) {
  auto res = embed_batch({text}, model_id, 1);
  if (!res[0].ok()) throw Error(res[0].failure->code, res[0].failure->message);
  return *res[0].value;
}

std::vector<Outcome<EmbeddingVector>> EmbeddingGateway::embed_batch(
    const std::vector<std::string>& texts, const std::string& model_id, int parallelism) {
  if (parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  std::vector<Outcome<EmbeddingVector>> out(texts.size());
  std::map<std::string, Outcome<EmbeddingVector>> resolved;
  std::vector<std::string> misses;
  for (size_t i = 0; i < texts.size(); ++i) {
    if (auto f = check_text(texts[i])) {
      out[i].failure = f;
      continue;
    }
    if (resolved.count(texts[i]) != 0) continue;
    auto& slot = resolved[texts[i]];
    if (auto hit = cache_->find(model_id, texts[i])) {
      slot.value = std::move(hit);
    } else if (options_.backend == Backend::kReplay) {
      slot.failure = Failure{ErrorCode::kReplayMiss, "no cached embedding for text under " + model_id};
    } else {
      misses.push_back(texts[i]);
    }
  }

  const size_t bs = options_.provider_batch_size;
  const size_t chunks = (misses.size() + bs - 1) / bs;
  std::vector<std::vector<Outcome<EmbeddingVector>>> chunk_out(chunks);
  parallel_for(chunks, parallelism, [&](size_t c) {
    const size_t lo = c * bs;
    const size_t hi = std::min(misses.size(), lo + bs);
    const std::vector<std::string> batch(misses.begin() + lo, misses.begin() + hi);
    auto& res = chunk_out[c];
    res.resize(batch.size());
    try {
      std::vector<std::vector<double>> vecs;
      {
        FairLimiter::Permit permit(limiter_);
        vecs = provider_->embed(batch, model_id);
      }
      if (vecs.size() != batch.size()) {
        throw Error(ErrorCode::kProviderError, "provider returned wrong number of vectors");
      }
      for (size_t k = 0; k < batch.size(); ++k) {
        if (vecs[k].empty()) throw Error(ErrorCode::kProviderError, "provider returned empty vector");
        check_dims(model_id, vecs[k].size());
        EmbeddingVector v(model_id, std::move(vecs[k]));
        cache_->put(batch[k], v);
        res[k].value = std::move(v);
      }
    } catch (const Error& e) {
      for (auto& r : res) {
        if (!r.ok()) r.failure = Failure{e.code(), e.what()};
      }
    }
  });
  for (size_t c = 0; c < chunks; ++c) {
    for (size_t k = 0; k < chunk_out[c].size(); ++k) resolved[misses[c * bs + k]] = chunk_out[c][k];
  }
  for (size_t i = 0; i < texts.size(); ++i) {
    if (!out[i].failure) out[i] = resolved.at(texts[i]);
  }
  return out;
}

}  // namespace twinbench
