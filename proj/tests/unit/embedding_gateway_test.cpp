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

#include <doctest.h>

#include <fstream>
#include <random>

#include "fakes.hpp"
#include "twinbench/embedding_gateway.hpp"
#include "twinbench/metrics.hpp"

namespace twinbench {
namespace {

using nlohmann::json;

// Counts every text it is asked to embed.
class CountingProvider : public EmbeddingProvider {
 public:
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts,
                                         const std::string& model_id) override {
    std::lock_guard lock(mu);
    ++calls;
    for (const auto& t : texts) ++per_text[t];
    return inner.embed(texts, model_id);
  }
  std::mutex mu;
  int calls = 0;
  std::map<std::string, int> per_text;
  HashingEmbeddingProvider inner{16};
};

TEST_CASE("fixture provider returns the table vectors exactly") {
  FixtureEmbeddingProvider fx;
  fx.add("a", {1, 0});
  fx.add("b", {0, 1});
  EmbeddingGateway gw(std::make_shared<FixtureEmbeddingProvider>(fx), nullptr);
  CHECK(gw.embed("a", "m").values() == std::vector<double>{1, 0});
  CHECK(gw.embed("b", "m").values() == std::vector<double>{0, 1});
  CHECK(gw.embed("a", "m").model_id() == "m");
  CHECK(cosine_similarity(gw.embed("a", "m"), gw.embed("b", "m")) == 0.0);
  try {
    gw.embed("c", "m");
    FAIL("expected ProviderError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kProviderError);
  }
}

TEST_CASE("fixture provider loads JSONL with per-model entries") {
  const auto dir = testing::temp_dir("fx");
  {
    std::ofstream out(dir / "fx.jsonl");
    out << R"({"text": "a", "vector": [1, 0]})" << "\n"
        << R"({"text": "a", "vector": [0.5, 0.5], "model": "other"})" << "\n\n";
  }
  auto fx = FixtureEmbeddingProvider::load(dir / "fx.jsonl");
  CHECK(fx.embed({"a"}, "m")[0] == std::vector<double>{1, 0});
  CHECK(fx.embed({"a"}, "other")[0] == std::vector<double>{0.5, 0.5});
  {
    std::ofstream out(dir / "bad.jsonl");
    out << "{nope\n";
  }
  CHECK_THROWS_AS(FixtureEmbeddingProvider::load(dir / "bad.jsonl"), Error);
  CHECK_THROWS_AS(FixtureEmbeddingProvider::load(dir / "missing.jsonl"), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cached embeddings are identical and dims are constant per model") {
  auto provider = std::make_shared<CountingProvider>();
  EmbeddingGateway gw(provider, nullptr);
  const auto v1 = gw.embed("the cat sat", "m");
  const auto v2 = gw.embed("the cat sat", "m");
  CHECK(v1 == v2);
  CHECK(provider->calls == 1);
  CHECK(gw.embed("another text entirely", "m").dims() == v1.dims());
}

TEST_CASE("empty and oversized texts fail per item") {
  EmbeddingOptions opts;
  opts.max_input_chars = 10;
  EmbeddingGateway gw(std::make_shared<HashingEmbeddingProvider>(8), nullptr, opts);
  const auto res = gw.embed_batch({"ok", "", "   ", "this is far too long"}, "m", 2);
  REQUIRE(res.size() == 4);
  CHECK(res[0].ok());
  CHECK(res[1].failure->code == ErrorCode::kEmptyText);
  CHECK(res[2].failure->code == ErrorCode::kEmptyText);
  CHECK(res[3].failure->code == ErrorCode::kTextTooLong);
  CHECK_THROWS_AS(gw.embed("", "m"), Error);
}

TEST_CASE("batch: order preserved, duplicates cost one provider call each") {
  std::mt19937_64 rng(3);
  std::vector<std::string> texts;
  for (int i = 0; i < 200; ++i) texts.push_back("text " + std::to_string(rng() % 40));
  auto provider = std::make_shared<CountingProvider>();
  EmbeddingOptions opts;
  opts.provider_batch_size = 7;
  EmbeddingGateway gw(provider, nullptr, opts);
  const auto wide = gw.embed_batch(texts, "m", 8);
  for (const auto& [t, n] : provider->per_text) CHECK(n == 1);
  CHECK(provider->per_text.size() == std::set<std::string>(texts.begin(), texts.end()).size());

  EmbeddingGateway fresh(std::make_shared<HashingEmbeddingProvider>(16), nullptr);
  const auto serial = fresh.embed_batch(texts, "m", 1);
  REQUIRE(wide.size() == texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    REQUIRE(wide[i].ok());
    CHECK(*wide[i].value == *serial[i].value);
    CHECK(*wide[i].value == gw.embed(texts[i], "m"));
  }
  CHECK(gw.embed_batch({}, "m", 4).empty());
}

TEST_CASE("replay backend: cache only, miss fails that item") {
  auto cache = std::make_shared<EmbeddingCache>();
  EmbeddingGateway live(std::make_shared<HashingEmbeddingProvider>(8), cache);
  live.embed("known", "m");
  auto provider = std::make_shared<CountingProvider>();
  EmbeddingOptions opts;
  opts.backend = Backend::kReplay;
  EmbeddingGateway replay(provider, cache, opts);
  const auto res = replay.embed_batch({"known", "unknown", "known"}, "m", 2);
  CHECK(res[0].ok());
  CHECK(res[2].ok());
  CHECK(res[1].failure->code == ErrorCode::kReplayMiss);
  CHECK(provider->calls == 0);
}

TEST_CASE("embedding cache file is bit-stable across reloads") {
  const auto dir = testing::temp_dir("emb");
  std::vector<EmbeddingVector> first;
  const std::vector<std::string> texts = {"alpha", "beta gamma", "caf\xC3\xA9"};
  {
    auto cache = std::make_shared<EmbeddingCache>(dir / "emb.jsonl");
    FixtureEmbeddingProvider fx;
    fx.add("alpha", {0.1, 1.0 / 3.0, 2.5e-300});
    fx.add("beta gamma", {-0.7, 1e10, 0.30000000000000004});
    fx.add("caf\xC3\xA9", {1, 2, 3});
    EmbeddingGateway gw(std::make_shared<FixtureEmbeddingProvider>(fx), cache);
    for (const auto& t : texts) first.push_back(gw.embed(t, "m"));
  }
  auto reloaded = std::make_shared<EmbeddingCache>(dir / "emb.jsonl");
  CHECK(reloaded->size() == texts.size());
  for (size_t i = 0; i < texts.size(); ++i) CHECK(*reloaded->find("m", texts[i]) == first[i]);
  CHECK_FALSE(reloaded->find("other-model", "alpha").has_value());
  std::filesystem::remove_all(dir);
}

TEST_CASE("provider returning inconsistent dims is rejected") {
  FixtureEmbeddingProvider fx;
  fx.add("a", {1, 0});
  fx.add("b", {1, 0, 0});
  EmbeddingGateway gw(std::make_shared<FixtureEmbeddingProvider>(fx), nullptr);
  gw.embed("a", "m");
  CHECK_THROWS_AS(gw.embed("b", "m"), Error);
}

TEST_CASE("http embedding provider request and response shape") {
  auto transport = std::make_shared<testing::ScriptedTransport>();
  transport->push(200, json{{"data",
                             {{{"index", 1}, {"embedding", {0.0, 1.0}}},
                              {{"index", 0}, {"embedding", {1.0, 0.0}}}}}}
                           .dump());
  transport->push(503, "down");
  HttpEmbeddingProvider p(transport);
  const auto vecs = p.embed({"a", "b"}, std::string(kMiniLmModel));
  CHECK(vecs[0] == std::vector<double>{1, 0});
  CHECK(vecs[1] == std::vector<double>{0, 1});
  const auto body = json::parse(transport->bodies[0]);
  CHECK(body.at("model") == "all-MiniLM-L6-v2");
  CHECK(body.at("input") == json{"a", "b"});
  CHECK(transport->paths[0] == "/v1/embeddings");
  CHECK_THROWS_AS(p.embed({"a"}, "m"), Error);
}

TEST_CASE("hashing embedder is deterministic and model-seeded") {
  HashingEmbeddingProvider h(32);
  const auto a = h.embed({"The cat sat.", "!!!"}, "m1");
  CHECK(a == h.embed({"The cat sat.", "!!!"}, "m1"));
  CHECK(a[0] != h.embed({"The cat sat."}, "m2")[0]);
  CHECK(a[0] == h.embed({"the CAT sat"}, "m1")[0]);
  for (const auto& v : a) CHECK(std::any_of(v.begin(), v.end(), [](double x) { return x != 0; }));
}

}  // namespace
}  // namespace twinbench
