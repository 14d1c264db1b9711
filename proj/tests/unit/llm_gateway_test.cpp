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
#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <thread>

#include "fakes.hpp"
#include "fixtures.hpp"
#include "twinbench/hashing.hpp"
#include "twinbench/llm_gateway.hpp"

namespace twinbench {
namespace {

using nlohmann::json;
using std::chrono::milliseconds;

std::vector<ChatMessage> sample_messages() {
  return {{"system", "You are 25 years old."}, {"user", "How anxious are you?"}};
}

GatewayOptions live_options(std::vector<milliseconds>* slept = nullptr) {
  GatewayOptions o;
  o.backend = Backend::kLive;
  o.api_key_env = "TWINBENCH_TEST_KEY";
  o.sleeper = [slept](milliseconds d) {
    if (slept) slept->push_back(d);
  };
  ::setenv("TWINBENCH_TEST_KEY", "sk-test", 1);
  return o;
}

TEST_CASE("sha256 known digests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("default profiles") {
  const auto g = default_profile("gpt-4o");
  CHECK(g.temperature == 0.6);
  CHECK(g.top_p == 1.0);
  CHECK(g.max_tokens == 200);
  CHECK(g.min_tokens == 0);
  const auto l = default_profile("llama-3-70b");
  CHECK(l.top_p == 0.9);
  CHECK(l.temperature == 0.6);
  CHECK_THROWS_AS(default_profile("nope"), Error);
}

TEST_CASE("config validation bounds") {
  auto c = default_profile("gpt-4o");
  CHECK_NOTHROW(c.validate());
  for (double t : {-0.1, 2.01}) {
    auto bad = c;
    bad.temperature = t;
    CHECK_THROWS_AS(bad.validate(), Error);
  }
  for (double p : {0.0, 1.5}) {
    auto bad = c;
    bad.top_p = p;
    CHECK_THROWS_AS(bad.validate(), Error);
  }
  auto bad = c;
  bad.min_tokens = 300;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("cache_key: equal inputs agree, any perturbation differs") {
  const auto cfg = default_profile("gpt-4o");
  const auto msgs = sample_messages();
  CHECK(cache_key(msgs, cfg) == cache_key(msgs, cfg));

  std::set<std::string> keys = {cache_key(msgs, cfg)};
  size_t variants = 1;
  for (size_t m = 0; m < msgs.size(); ++m) {
    for (size_t pos = 0; pos < msgs[m].content.size(); ++pos) {
      auto changed = msgs;
      changed[m].content[pos] = static_cast<char>(changed[m].content[pos] ^ 0x01);
      keys.insert(cache_key(changed, cfg));
      ++variants;
    }
    auto role = msgs;
    role[m].role = "assistant";
    keys.insert(cache_key(role, cfg));
    ++variants;
  }
  auto extra = msgs;
  extra.push_back({"user", ""});
  keys.insert(cache_key(extra, cfg));
  ++variants;
  CHECK(keys.size() == variants);

  auto t = cfg;
  t.temperature = 0.7;
  CHECK(cache_key(msgs, t) != cache_key(msgs, cfg));
  for (auto mutate : std::vector<std::function<void(GenerationConfig&)>>{
           [](auto& c) { c.top_p = 0.9; }, [](auto& c) { c.max_tokens = 201; },
           [](auto& c) { c.min_tokens = 1; }, [](auto& c) { c.model_id = "gpt-4o-mini"; },
           [](auto& c) { c.seed_note = "s1"; }}) {
    auto c = cfg;
    mutate(c);
    CHECK(cache_key(msgs, c) != cache_key(msgs, cfg));
  }
}

TEST_CASE("request body carries the generation parameters") {
  const auto body = chat_request_body(sample_messages(), default_profile("gpt-4o"));
  CHECK(body.at("temperature").get<double>() == 0.6);
  CHECK(body.at("top_p").get<double>() == 1.0);
  CHECK(body.at("max_tokens").get<int>() == 200);
  CHECK(body.at("model") == "gpt-4o");
  CHECK(body.at("messages").size() == 2);
  CHECK(body.at("messages")[1].at("role") == "user");
  CHECK_FALSE(body.contains("min_tokens"));

  auto transport = std::make_shared<testing::ScriptedTransport>();
  transport->push(200, testing::chat_reply("fine"));
  LlmGateway gw(transport, nullptr, live_options());
  CHECK(gw.complete(sample_messages(), default_profile("gpt-4o")) == "fine");
  REQUIRE(transport->bodies.size() == 1);
  CHECK(json::parse(transport->bodies[0]) == body);
  CHECK(transport->paths[0] == "/v1/chat/completions");
  CHECK(transport->last_headers.at("Authorization") == "Bearer sk-test");
}

TEST_CASE("429, 429, 200 succeeds with two retries and non-decreasing backoff") {
  auto transport = std::make_shared<testing::ScriptedTransport>();
  transport->push(429, "slow down");
  transport->push(429, "slow down");
  transport->push(200, testing::chat_reply("ok"));
  std::vector<milliseconds> slept;
  LlmGateway gw(transport, nullptr, live_options(&slept));
  const auto r = gw.complete_record(sample_messages(), default_profile("gpt-4o"));
  CHECK(r.response_text == "ok");
  CHECK(r.retries == 2);
  CHECK(transport->calls == 3);
  REQUIRE(slept.size() == 2);
  CHECK(slept[0] <= slept[1]);
  CHECK(r.backoff_ms == std::vector<int64_t>{slept[0].count(), slept[1].count()});
}

TEST_CASE("retries stop at the cap with RateLimited") {
  auto transport = std::make_shared<testing::ScriptedTransport>(
      [](const std::string&, const std::string&) { return HttpResponse{429, "", {}}; });
  std::vector<milliseconds> slept;
  auto opts = live_options(&slept);
  opts.retry.max_retries = 3;
  LlmGateway gw(transport, nullptr, opts);
  try {
    gw.complete(sample_messages(), default_profile("gpt-4o"));
    FAIL("expected RateLimited");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRateLimited);
  }
  CHECK(transport->calls == 4);
  CHECK(slept.size() == 3);
}

TEST_CASE("backoff is non-decreasing and capped") {
  RetryPolicy p;
  p.initial_backoff = milliseconds(100);
  p.multiplier = 3;
  p.max_backoff = milliseconds(2000);
  milliseconds prev{0};
  for (int i = 1; i < 20; ++i) {
    const auto d = p.delay(i);
    CHECK(d >= prev);
    CHECK(d <= p.max_backoff);
    prev = d;
  }
  CHECK(p.delay(1) == milliseconds(100));
  CHECK(p.delay(19) == milliseconds(2000));
}

TEST_CASE("non-429 errors and malformed bodies are ProviderError") {
  for (auto [status, body] : std::vector<std::pair<int, std::string>>{
           {500, "boom"}, {401, "unauthorized"}, {200, "not json"}, {200, "{}"}}) {
    auto transport = std::make_shared<testing::ScriptedTransport>();
    transport->push(status, body);
    LlmGateway gw(transport, nullptr, live_options());
    try {
      gw.complete(sample_messages(), default_profile("gpt-4o"));
      FAIL("expected ProviderError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kProviderError);
    }
    CHECK(gw.cache().size() == 0);
  }
}

TEST_CASE("live backend without credentials fails before any request") {
  auto transport = std::make_shared<testing::ScriptedTransport>();
  auto opts = live_options();
  opts.api_key_env = "TWINBENCH_TEST_KEY_UNSET";
  ::unsetenv("TWINBENCH_TEST_KEY_UNSET");
  LlmGateway gw(transport, nullptr, opts);
  CHECK_THROWS_AS(gw.complete(sample_messages(), default_profile("gpt-4o")), Error);
  CHECK(transport->calls == 0);
}

TEST_CASE("empty message list is rejected") {
  LlmGateway gw(nullptr, nullptr, GatewayOptions{});
  CHECK_THROWS_AS(gw.complete({}, default_profile("gpt-4o")), Error);
}

TEST_CASE("record then replay returns byte-identical text with no network") {
  const auto dir = testing::temp_dir("gw");
  const auto path = dir / "cache.jsonl";
  const auto cfg = default_profile("llama-3-70b");
  const std::vector<std::string> texts = {"plain", "unicode \xE2\x80\x94 caf\xC3\xA9",
                                          "line\nbreak \"quoted\" \\ tab\t", " "};
  std::vector<std::vector<ChatMessage>> requests;
  {
    auto transport = std::make_shared<testing::ScriptedTransport>();
    for (const auto& t : texts) transport->push(200, testing::chat_reply(t));
    LlmGateway gw(transport, std::make_shared<GenerationCache>(path), live_options());
    for (size_t i = 0; i < texts.size(); ++i) {
      requests.push_back({{"user", "question " + std::to_string(i)}});
      CHECK(gw.complete(requests.back(), cfg) == texts[i]);
    }
    // Second live call for the same request is served from the cache.
    CHECK(gw.complete_record(requests[0], cfg).backend == Backend::kReplay);
    CHECK(transport->calls == static_cast<int>(texts.size()));
  }
  auto forbidden = std::make_shared<testing::ForbiddenTransport>();
  GatewayOptions replay;
  replay.backend = Backend::kReplay;
  LlmGateway gw(forbidden, std::make_shared<GenerationCache>(path), replay);
  for (size_t i = 0; i < texts.size(); ++i) CHECK(gw.complete(requests[i], cfg) == texts[i]);
  CHECK(forbidden->calls == 0);
  try {
    gw.complete({{"user", "never recorded"}}, cfg);
    FAIL("expected ReplayMiss");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kReplayMiss);
  }
  CHECK(forbidden->calls == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("cache tolerates a torn trailing line and rejects corruption elsewhere") {
  const auto dir = testing::temp_dir("cache");
  const auto path = dir / "cache.jsonl";
  GenerationRecord r;
  r.cache_key = "k1";
  r.messages = sample_messages();
  r.config = default_profile("gpt-4o");
  r.response_text = "hi";
  {
    std::ofstream out(path);
    out << json(r).dump() << "\n" << R"({"cache_key": "k2", "requ)";
  }
  GenerationCache c(path);
  CHECK(c.size() == 1);
  CHECK(c.find("k1")->response_text == "hi");
  {
    std::ofstream out(path);
    out << "garbage\n" << json(r).dump() << "\n";
  }
  CHECK_THROWS_AS(GenerationCache{path}, Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("generation record JSON round trip") {
  GenerationRecord r;
  r.cache_key = cache_key(sample_messages(), default_profile("gpt-4o"));
  r.messages = sample_messages();
  r.config = default_profile("gpt-4o");
  r.config.seed_note = "seed 7";
  r.response_text = "answer";
  r.latency_ms = 42;
  r.timestamp = "2026-01-01T00:00:00Z";
  r.retries = 1;
  r.backoff_ms = {500};
  CHECK(json(r).get<GenerationRecord>() == r);
}

std::vector<GenerationPlan> sample_plans(int n) {
  std::mt19937_64 rng(11);
  std::vector<GenerationPlan> plans;
  for (int p = 0; p < n; ++p) {
    const auto persona = testing::random_persona(rng, "p" + std::to_string(p));
    for (const auto& c : Condition::all()) {
      const auto plan = plan_condition(c, persona);
      const auto twin = prepare_twin(plan, persona);
      for (auto q : plan.targets) plans.push_back({twin, q});
    }
  }
  return plans;
}

TEST_CASE("batch order is independent of parallelism; one miss fails one cell") {
  const auto plans = sample_plans(3);
  const auto cfg = default_profile("gpt-4o");
  auto cache = std::make_shared<GenerationCache>();
  {
    auto transport = std::make_shared<testing::ScriptedTransport>(testing::echo_chat);
    LlmGateway live(transport, cache, live_options());
    const auto recorded = run_generation_batch(live, plans, cfg, 4);
    for (const auto& o : recorded) REQUIRE(o.ok());
  }
  GatewayOptions replay;
  replay.backend = Backend::kReplay;
  LlmGateway gw(nullptr, cache, replay);
  const auto serial = run_generation_batch(gw, plans, cfg, 1);
  const auto wide = run_generation_batch(gw, plans, cfg, 8);
  REQUIRE(serial.size() == plans.size());
  REQUIRE(wide.size() == plans.size());
  for (size_t i = 0; i < plans.size(); ++i) {
    REQUIRE(serial[i].ok());
    REQUIRE(wide[i].ok());
    CHECK(*serial[i].value == *wide[i].value);
    CHECK(serial[i].value->messages == build_chat_messages(plans[i].twin, plans[i].target));
  }

  // Drop one record: only that cell fails.
  auto partial = std::make_shared<GenerationCache>();
  const std::string missing = serial[5].value->cache_key;
  for (const auto& r : cache->records()) {
    if (r.cache_key != missing) partial->put(r);
  }
  LlmGateway gw2(nullptr, partial, replay);
  const auto res = run_generation_batch(gw2, plans, cfg, 8);
  int failures = 0;
  for (size_t i = 0; i < res.size(); ++i) {
    if (!res[i].ok()) {
      ++failures;
      CHECK(i == 5);
      CHECK(res[i].failure->code == ErrorCode::kReplayMiss);
    }
  }
  CHECK(failures == 1);

  CHECK(run_generation_batch(gw, {}, cfg, 4).empty());
  CHECK_THROWS_AS(run_generation_batch(gw, plans, cfg, 0), Error);
}

TEST_CASE("in-flight requests never exceed the limit") {
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  auto transport = std::make_shared<testing::ScriptedTransport>(
      [&](const std::string& path, const std::string& body) {
        const int now = ++active;
        int prev = peak.load();
        while (now > prev && !peak.compare_exchange_weak(prev, now)) {
        }
        std::this_thread::sleep_for(milliseconds(2));
        --active;
        return testing::echo_chat(path, body);
      });
  auto opts = live_options();
  opts.max_in_flight = 2;
  LlmGateway gw(transport, nullptr, opts);
  const auto plans = sample_plans(2);
  const auto res = run_generation_batch(gw, plans, default_profile("gpt-4o"), 8);
  for (const auto& o : res) CHECK(o.ok());
  CHECK(peak.load() <= 2);
  CHECK(gw.limiter().peak() <= 2);
}

TEST_CASE("fair limiter admits waiters in arrival order") {
  FairLimiter lim(1);
  lim.acquire();
  std::vector<int> order;
  std::mutex mu;
  std::vector<std::thread> threads;
  for (int i = 0; i < 5; ++i) {
    threads.emplace_back([&, i] {
      lim.acquire();
      {
        std::lock_guard lock(mu);
        order.push_back(i);
      }
      lim.release();
    });
    // Let thread i take its ticket before i + 1 starts.
    std::this_thread::sleep_for(milliseconds(20));
  }
  lim.release();
  for (auto& t : threads) t.join();
  CHECK(order == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("http transport against a local server: 429, 429, 200") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth;
  std::string seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    const int n = ++hits;
    seen_auth = req.get_header_value("Authorization");
    seen_body = req.body;
    if (n <= 2) {
      res.status = 429;
      res.set_content("{}", "application/json");
      return;
    }
    res.set_content(testing::chat_reply("served"), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  std::shared_ptr<Transport> transport =
      make_http_transport("http://127.0.0.1:" + std::to_string(port), milliseconds(5000));
  std::vector<milliseconds> slept;
  LlmGateway gw(transport, nullptr, live_options(&slept));
  const auto r = gw.complete_record(sample_messages(), default_profile("gpt-4o"));
  server.stop();
  th.join();

  CHECK(r.response_text == "served");
  CHECK(r.retries == 2);
  CHECK(hits == 3);
  REQUIRE(slept.size() == 2);
  CHECK(slept[0] <= slept[1]);
  CHECK(seen_auth == "Bearer sk-test");
  CHECK(json::parse(seen_body).at("max_tokens") == 200);
}

TEST_CASE("http transport: unreachable host is a ProviderError") {
  // Port 9 on loopback is almost never listening.
  auto transport = make_http_transport("http://127.0.0.1:9", milliseconds(500));
  try {
    transport->post_json("/x", "{}", {});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::kProviderError || e.code() == ErrorCode::kTimeout));
  }
}

}  // namespace
}  // namespace twinbench
