// Copyright 2026 The igedet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "igedet/chat.h"
#include "igedet/digest.h"
#include "igedet/embedding.h"
#include "igedet/errors.h"
#include "igedet/grounding.h"
#include "igedet/image.h"
#include "igedet/prompts.h"
#include "igedet/structured.h"
#include "test_util.h"

namespace igedet::provider {
namespace {

using nlohmann::json;

// ---- structured output ----

TEST(StructuredTest, StripsCodeFences) {
  const auto v = parse_structured("```json\n{\"genres\":[\"sports\"]}\n``` ",
                                  schema::kGlobalContext);
  EXPECT_EQ(v.at("genres"), json::array({"sports"}));
  // Missing attributes are filled in empty.
  EXPECT_EQ(v.at("app_name"), "");
  EXPECT_EQ(v.at("device_support"), json::array());
  EXPECT_EQ(v.size(), 7u);
}

TEST(StructuredTest, FindsJsonInsideProse) {
  const auto v = parse_structured(
      "Sure! Here is what I found: {\"candidates\":[]} Let me know.",
      schema::kCandidates);
  EXPECT_TRUE(v.at("candidates").empty());
}

TEST(StructuredTest, RamblingIsParseErrorCarryingRaw) {
  const std::string raw = "I think there might be a button, not sure.";
  try {
    parse_structured(raw, schema::kCandidates);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.raw(), raw);
  }
}

TEST(StructuredTest, SkipsUnbalancedAndInvalidBrackets) {
  const auto v = extract_json("set {a} then [1, 2 and {\"verdict\": \"match\"}");
  EXPECT_EQ(v, json({{"verdict", "match"}}));
}

TEST(StructuredTest, BracesInsideStringsDoNotConfuseScanner) {
  const auto v = extract_json(R"(x {"reason": "a } b { c", "verdict": "mismatch"})");
  EXPECT_EQ(v.at("reason"), "a } b { c");
}

TEST(StructuredTest, CandidatesAcceptBareStringArray) {
  const auto v = parse_structured(R"(["start button", {"name": "ball"}])",
                                  schema::kCandidates);
  ASSERT_EQ(v.at("candidates").size(), 2u);
  EXPECT_EQ(v["candidates"][0]["name"], "start button");
  EXPECT_EQ(v["candidates"][1]["name"], "ball");
}

TEST(StructuredTest, VerdictsAreValidatedAndNormalized) {
  EXPECT_EQ(parse_structured(R"({"verdict": " Match ", "reason": 3})",
                             schema::kVerification)
                .at("verdict"),
            "match");
  EXPECT_THROW(parse_structured(R"({"verdict": "maybe"})", schema::kVerification),
               ParseError);
  EXPECT_THROW(parse_structured(R"({"verdict": "missed"})", schema::kVerification),
               ParseError);
  EXPECT_EQ(parse_structured(R"({"verdict": "hallucination"})",
                             schema::kMissReflection)
                .at("reason"),
            "");
}

TEST(StructuredTest, BooleansAcceptStrings) {
  EXPECT_TRUE(parse_structured(R"({"confident": "yes"})", schema::kAdvisor)
                  .at("confident")
                  .get<bool>());
  EXPECT_FALSE(parse_structured(R"({"interactable": false})",
                                schema::kInteractability)
                   .at("interactable")
                   .get<bool>());
  EXPECT_THROW(parse_structured(R"({"interactable": "perhaps"})",
                                schema::kInteractability),
               ParseError);
}

TEST(StructuredTest, AnswersAcceptObjectForm) {
  const auto v = parse_structured(
      R"({"candidates": [{"name": "ball", "answers": {"color": "white"}}]})",
      schema::kAnswers);
  EXPECT_EQ(v["candidates"][0]["answers"][0]["dimension"], "color");
  EXPECT_EQ(v["candidates"][0]["answers"][0]["answer"], "white");
}

TEST(StructuredTest, LocalContextMustBeNonEmpty) {
  EXPECT_THROW(parse_structured(R"({"scene_summary": "  "})", schema::kLocalContext),
               ParseError);
}

TEST(StructuredTest, UnknownSchemaIsTemplateError) {
  EXPECT_THROW(parse_structured("{}", "nope"), TemplateError);
}

// ---- prompt registry ----

std::shared_ptr<const PromptRegistry> shipped_registry() {
  static auto reg = std::make_shared<const PromptRegistry>(
      PromptRegistry::load_dir(testutil::asset("prompts")));
  return reg;
}

TEST(PromptRegistryTest, ShippedAssetsValidate) {
  const auto reg = shipped_registry();
  EXPECT_EQ(reg->ids().size(), known_template_ids().size());
  for (const auto& id : known_template_ids()) {
    const auto& t = reg->get(id);
    EXPECT_FALSE(t.inputs.empty()) << id;
    EXPECT_TRUE(is_registered_schema(t.schema_id)) << id;
    EXPECT_EQ(t.placeholders(), t.inputs) << id;
  }
}

TEST(PromptRegistryTest, RenderIsByteStable) {
  const auto& t = shipped_registry()->get("PI.1");
  const std::map<std::string, std::string> slots = {{"store_text", "Baseball!"}};
  const std::string a = t.render(slots);
  EXPECT_EQ(a, t.render(slots));
  EXPECT_NE(a.find("Baseball!"), std::string::npos);
  EXPECT_EQ(a.find("{{"), std::string::npos);
}

TEST(PromptRegistryTest, MissingSlotIsTemplateError) {
  EXPECT_THROW(shipped_registry()->get("PI.1").render({}), TemplateError);
}

TEST(PromptRegistryTest, DemonstrationsFillReservedSlot) {
  const auto& t = shipped_registry()->get("PIII");
  const std::string out = t.render({{"global_context", "g"},
                                    {"scene_summary", "s"},
                                    {"candidate_name", "tree"},
                                    {"cd_text", "a tall tree"}},
                                   {"DEMO-A", "DEMO-B"});
  EXPECT_NE(out.find("Example 1:\nDEMO-A"), std::string::npos);
  EXPECT_NE(out.find("Example 2:\nDEMO-B"), std::string::npos);
}

PromptTemplate make(const std::string& id, const std::string& inputs,
                    const std::string& schema, const std::string& body) {
  return PromptTemplate::parse("# id: " + id + "\n# inputs: " + inputs +
                                   "\n# schema: " + schema + "\n---\n" + body,
                               "test");
}

PromptRegistry complete_registry() {
  PromptRegistry reg;
  for (const auto& id : known_template_ids()) {
    reg.add(make(id, "a", "candidates", "{{a}}"));
  }
  return reg;
}

TEST(PromptRegistryTest, StartupValidationCatchesProblems) {
  EXPECT_NO_THROW(complete_registry().validate());

  PromptRegistry missing;
  missing.add(make("PI.1", "a", "candidates", "{{a}}"));
  EXPECT_THROW(missing.validate(), TemplateError);

  auto undeclared = complete_registry();
  undeclared.add(make("extra", "a", "candidates", "{{a}} {{b}}"));
  EXPECT_THROW(undeclared.validate(), TemplateError);

  auto unused = complete_registry();
  unused.add(make("extra", "a, b", "candidates", "{{a}}"));
  EXPECT_THROW(unused.validate(), TemplateError);

  auto bad_schema = complete_registry();
  bad_schema.add(make("extra", "a", "poems", "{{a}}"));
  EXPECT_THROW(bad_schema.validate(), TemplateError);

  auto dup = complete_registry();
  EXPECT_THROW(dup.add(make("PI.1", "a", "candidates", "{{a}}")), TemplateError);
}

TEST(PromptTemplateTest, ParseRejectsMalformedFiles) {
  EXPECT_THROW(PromptTemplate::parse("# id: x\n# schema: candidates\nbody", "t"),
               TemplateError);
  EXPECT_THROW(PromptTemplate::parse("# schema: candidates\n---\nbody", "t"),
               TemplateError);
  EXPECT_THROW(PromptTemplate::parse("id: x\n---\n", "t"), TemplateError);
}

TEST(DemonstrationPoolTest, SeededSelectionIsDistinctAndReproducible) {
  const auto pool =
      DemonstrationPool::load(testutil::asset("demos/classification.json"));
  ASSERT_GE(pool.size(), 3u);
  Rng a(5), b(5);
  const auto x = pool.select(a);
  EXPECT_EQ(x, pool.select(b));
  ASSERT_EQ(x.size(), 3u);
  EXPECT_NE(x[0], x[1]);
  EXPECT_NE(x[1], x[2]);
  EXPECT_NE(x[0], x[2]);
}

// ---- chat ----

ImagePayload scene(const std::string& name) {
  return load_image(testutil::fixture("scenes/" + name + ".png"));
}

TEST(ChatTest, ScriptedMockReturnsCannedJsonForTemplate) {
  const std::string canned =
      R"({"app_name":"Baseball Kings VR","genres":["sports"]})";
  auto mock = std::make_shared<ScriptedChatBackend>(
      std::vector<ScriptedChatBackend::Rule>{{"PI.1", {}, {canned}}});
  ChatClient client(shipped_registry(), mock);
  CallLedger ledger;
  EXPECT_EQ(client.chat({"PI.1", {{"store_text", "x"}}}, &ledger), canned);
  EXPECT_EQ(ledger.chat_calls, 1);
  EXPECT_EQ(ledger.stage("PI.1"), 1);
  // Nothing scripted for PI.2.
  EXPECT_THROW(client.chat({"PI.2", {{"global_context", "g"}}, {scene("donut")}}),
               ReplayMiss);
}

TEST(ChatTest, ContainsFiltersAndSequencedResponses) {
  auto mock = ScriptedChatBackend::from_json(json::parse(R"({"rules": [
    {"template": "PI.1", "contains": "fishing", "response": {"app_name": "Lake"}},
    {"template": "PI.1", "responses": ["first", "second"]}
  ]})"));
  ChatClient client(shipped_registry(), mock);
  EXPECT_EQ(json::parse(client.chat({"PI.1", {{"store_text", "a fishing game"}}}))
                .at("app_name"),
            "Lake");
  EXPECT_EQ(client.chat({"PI.1", {{"store_text", "other"}}}), "first");
  EXPECT_EQ(client.chat({"PI.1", {{"store_text", "other"}}}), "second");
  EXPECT_EQ(client.chat({"PI.1", {{"store_text", "other"}}}), "second");
}

TEST(ChatTest, ImageCountIsChecked) {
  auto mock = std::make_shared<ScriptedChatBackend>();
  ChatClient client(shipped_registry(), mock);
  EXPECT_THROW(client.render({"PI.2", {{"global_context", "g"}}}), TemplateError);
}

TEST(ChatTest, StructuredReasksThenSucceeds) {
  auto mock = std::make_shared<ScriptedChatBackend>(
      std::vector<ScriptedChatBackend::Rule>{
          {"PI.1", {}, {"no idea", R"({"app_name": "A"})"}}});
  ChatClient client(shipped_registry(), mock);
  CallLedger ledger;
  const auto v = client.chat_structured({"PI.1", {{"store_text", "s"}}}, &ledger);
  EXPECT_EQ(v.at("app_name"), "A");
  EXPECT_EQ(ledger.stage("PI.1"), 2);
}

TEST(ChatTest, StructuredGivesUpAfterTwoReasks) {
  auto mock = std::make_shared<ScriptedChatBackend>(
      std::vector<ScriptedChatBackend::Rule>{{"PI.1", {}, {"nope"}}});
  ChatClient client(shipped_registry(), mock);
  CallLedger ledger;
  EXPECT_THROW(client.chat_structured({"PI.1", {{"store_text", "s"}}}, &ledger),
               ParseError);
  EXPECT_EQ(ledger.stage("PI.1"), 3);
}

class FlakyBackend : public ChatBackend {
 public:
  explicit FlakyBackend(int failures) : failures_(failures) {}
  std::string complete(const RenderedChat&) override {
    if (calls_++ < failures_) throw TransportError("connection reset");
    return "ok";
  }
  int calls_ = 0;

 private:
  int failures_;
};

TEST(ChatTest, TransportErrorsRetryWithBackoff) {
  std::vector<long> sleeps;
  RetryPolicy policy;
  policy.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); };

  auto flaky = std::make_shared<FlakyBackend>(2);
  ChatClient ok(shipped_registry(), flaky, 4, policy);
  EXPECT_EQ(ok.chat({"PI.1", {{"store_text", "s"}}}), "ok");
  EXPECT_EQ(flaky->calls_, 3);
  EXPECT_EQ(sleeps, (std::vector<long>{500, 1000}));

  auto dead = std::make_shared<FlakyBackend>(10);
  ChatClient bad(shipped_registry(), dead, 4, policy);
  EXPECT_THROW(bad.chat({"PI.1", {{"store_text", "s"}}}), TransportError);
  EXPECT_EQ(dead->calls_, 3);
}

TEST(ChatTest, PerTemplateOverride) {
  auto main = std::make_shared<ScriptedChatBackend>(
      std::vector<ScriptedChatBackend::Rule>{{"PI.1", {}, {"main"}}});
  auto other = std::make_shared<ScriptedChatBackend>(
      std::vector<ScriptedChatBackend::Rule>{{"PI.1", {}, {"other"}}});
  ChatClient client(shipped_registry(), main);
  client.set_override("PI.1", other);
  EXPECT_EQ(client.chat({"PI.1", {{"store_text", "s"}}}), "other");
}

TEST(ReplayTest, RecordedRunReplaysByteIdentical) {
  testutil::TempDir dir;
  auto store = std::make_shared<ReplayStore>(dir.path());
  auto mock = std::make_shared<ScriptedChatBackend>(
      std::vector<ScriptedChatBackend::Rule>{
          {"PI.2", {}, {R"({"scene_summary": "a baseball field"})"}}});
  const ChatRequest req{"PI.2", {{"global_context", "g"}}, {scene("baseball")}};

  ChatClient recorder(shipped_registry(),
                      std::make_shared<RecordingChatBackend>(mock, store));
  const std::string recorded = recorder.chat(req);
  EXPECT_EQ(store->count(), 1u);

  ChatClient replayer(shipped_registry(),
                      std::make_shared<ReplayChatBackend>(store));
  EXPECT_EQ(replayer.chat(req), recorded);
  EXPECT_EQ(replayer.chat(req), recorded);

  const std::string digest =
      replay_digest(replayer.render(req).canonical());
  EXPECT_EQ(digest.size(), 64u);
  EXPECT_TRUE(std::filesystem::exists(store->path_for("PI.2", digest)));
}

TEST(ReplayTest, UnknownKeyIsReplayMiss) {
  testutil::TempDir dir;
  ChatClient replayer(shipped_registry(),
                      std::make_shared<ReplayChatBackend>(
                          std::make_shared<ReplayStore>(dir.path())));
  EXPECT_THROW(replayer.chat({"PI.1", {{"store_text", "s"}}}), ReplayMiss);
}

TEST(ReplayTest, KeyDependsOnImageDigestNotPath) {
  const auto img = scene("donut");
  auto copy = img;
  copy.uri = "/elsewhere/donut.png";
  RenderedChat a{"PI.2", 1, "p", {img}, {}};
  RenderedChat b{"PI.2", 1, "p", {copy}, {}};
  EXPECT_EQ(replay_digest(a.canonical()), replay_digest(b.canonical()));
  RenderedChat c{"PI.2", 1, "p", {scene("garden")}, {}};
  EXPECT_NE(replay_digest(a.canonical()), replay_digest(c.canonical()));
  RenderedChat d{"PI.2", 2, "p", {img}, {}};
  EXPECT_NE(replay_digest(a.canonical()), replay_digest(d.canonical()));
}

TEST(ReplayTest, ConcurrentReadersAndWriters) {
  testutil::TempDir dir;
  ReplayStore store(dir.path());
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i) {
        const json key = {{"k", t * 100 + i}};
        store.put("x", key, i);
        ASSERT_EQ(store.get("x", key)->get<int>(), i);
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(store.count(), 100u);
}

TEST(LimiterTest, NeverExceedsLimit) {
  ConcurrencyLimiter limiter(2);
  std::atomic<int> active{0}, worst{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 20; ++i) {
        auto permit = limiter.acquire();
        const int now = ++active;
        int w = worst.load();
        while (now > w && !worst.compare_exchange_weak(w, now)) {
        }
        std::this_thread::yield();
        --active;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_LE(worst.load(), 2);
  EXPECT_LE(limiter.peak(), 2u);
}

// ---- embeddings ----

EmbeddingVector V(std::vector<double> v) { return {std::move(v), "t"}; }

TEST(CosineTest, SelfSimilarityIsOne) {
  EXPECT_NEAR(cosine(V({3, -4, 12}), V({3, -4, 12})), 1.0, 1e-15);
}

TEST(CosineTest, OrthogonalIsZero) {
  EXPECT_EQ(cosine(V({1, 0, 0}), V({0, 1, 0})), 0.0);
}

TEST(CosineTest, Errors) {
  EXPECT_THROW(cosine(V({1, 0}), V({1, 0, 0})), DimensionMismatch);
  EXPECT_THROW(cosine(V({1, 0}), EmbeddingVector{{1, 0}, "other"}),
               DimensionMismatch);
  EXPECT_THROW(cosine(V({0, 0}), V({1, 0})), ZeroVector);
}

TEST(EmbeddingTest, HashEmbedderIsDeterministicUnitNorm) {
  HashEmbedder e;
  const auto a = e.embed("start button");
  const auto b = HashEmbedder().embed("start button");
  EXPECT_EQ(a, b);
  EXPECT_NEAR(cosine(a, b), 1.0, 1e-12);
  double n = 0;
  for (double x : a.values) n += x * x;
  EXPECT_NEAR(n, 1.0, 1e-12);
  EXPECT_LT(std::abs(cosine(a, e.embed("tree"))), 0.85);
}

TEST(EmbeddingTest, TableEmbedderOrthogonalLabels) {
  auto table = TableEmbedder::from_json(json::parse(R"({
    "model_tag": "tbl", "vectors": {"cat": [1, 0, 0], "dog": [0, 1, 0]}})"));
  EXPECT_EQ(cosine(table->embed("cat"), table->embed("dog")), 0.0);
  EXPECT_EQ(table->embed("fish").values.size(), 3u);
}

class CountingEmbedder : public EmbeddingBackend {
 public:
  EmbeddingVector embed(const std::string& text) override {
    ++calls;
    return inner.embed(text);
  }
  std::string model_tag() const override { return inner.model_tag(); }
  std::atomic<int> calls{0};
  HashEmbedder inner;
};

TEST(EmbeddingTest, ClientCachesByExactString) {
  auto backend = std::make_shared<CountingEmbedder>();
  EmbeddingClient client(backend);
  const auto first = client.embed("Tree");
  for (int i = 0; i < 5; ++i) EXPECT_EQ(client.embed("Tree"), first);
  client.embed("tree");
  EXPECT_EQ(backend->calls.load(), 2);
  EXPECT_THROW(client.embed(""), UsageError);
}

TEST(EmbeddingTest, ReplayRoundTrip) {
  testutil::TempDir dir;
  auto store = std::make_shared<ReplayStore>(dir.path());
  auto rec = std::make_shared<RecordingEmbeddingBackend>(
      std::make_shared<HashEmbedder>(), store);
  const auto v = rec->embed("ball");
  ReplayEmbeddingBackend replay(store, "hash-64");
  EXPECT_EQ(replay.embed("ball"), v);
  EXPECT_THROW(replay.embed("bat"), ReplayMiss);
}

// ---- grounding ----

std::shared_ptr<SyntheticGroundingBackend> donut_rules() {
  return std::make_shared<SyntheticGroundingBackend>(
      std::vector<SyntheticGroundingBackend::Rule>{
          {"donut", "", {{{100, 80, 50, 50}, 0.9}}}});
}

TEST(GroundingTest, SyntheticRuleMatchesSubstring) {
  GroundingClient client(donut_rules());
  CallLedger ledger;
  const auto r =
      client.ground({scene("donut"), {"donut with colored granules"}}, &ledger);
  ASSERT_EQ(r.results.size(), 1u);
  ASSERT_EQ(r.results[0].size(), 1u);
  EXPECT_EQ(r.results[0][0], (geo::ScoredBox{{100, 80, 50, 50}, 0.9}));
  EXPECT_EQ(ledger.ground_calls, 1);
}

TEST(GroundingTest, UnmatchedDescriptionGetsEmptyList) {
  GroundingClient client(donut_rules());
  const auto r = client.ground({scene("donut"), {"a purple giraffe"}});
  ASSERT_EQ(r.results.size(), 1u);
  EXPECT_TRUE(r.results[0].empty());
}

TEST(GroundingTest, OrderIsPreserved) {
  GroundingClient client(donut_rules());
  const auto r = client.ground({scene("donut"), {"white plate", "DONUT"}});
  ASSERT_EQ(r.results.size(), 2u);
  EXPECT_TRUE(r.results[0].empty());
  EXPECT_EQ(r.results[1].size(), 1u);
}

TEST(GroundingTest, ImageScopedRules) {
  auto backend = std::make_shared<SyntheticGroundingBackend>(
      std::vector<SyntheticGroundingBackend::Rule>{
          {"tree", "garden.png", {{{400, 150, 120, 200}, 0.8}}},
          {"tree", "fishing.png", {{{700, 120, 100, 180}, 0.7}}}});
  GroundingClient client(backend);
  EXPECT_EQ(client.ground({scene("garden"), {"tree"}}).results[0][0].score, 0.8);
  EXPECT_EQ(client.ground({scene("fishing"), {"tree"}}).results[0][0].score, 0.7);
  EXPECT_TRUE(client.ground({scene("donut"), {"tree"}}).results[0].empty());
}

TEST(GroundingTest, ClientClampsAndDropsDegenerateBoxes) {
  auto backend = std::make_shared<SyntheticGroundingBackend>(
      std::vector<SyntheticGroundingBackend::Rule>{
          {"edge", "", {{{900, 500, 100, 100}, 0.5}, {{2000, 10, 5, 5}, 0.4}}}});
  GroundingClient client(backend);
  const auto r = client.ground({scene("donut"), {"edge"}});
  ASSERT_EQ(r.results[0].size(), 1u);
  EXPECT_EQ(r.results[0][0].box, (geo::BoundingBox{900, 500, 60, 40}));
}

TEST(GroundingWireTest, ParseValidatesShape) {
  EXPECT_THROW(parse_ground_response(json::parse(R"({"results": []})"), 1),
               ProtocolError);
  EXPECT_THROW(parse_ground_response(json::parse(R"({"boxes": []})"), 0),
               ProtocolError);
  EXPECT_THROW(parse_ground_response(
                   json::parse(R"({"results": [{"boxes": [{"x": 1}]}]})"), 1),
               ProtocolError);
  EXPECT_THROW(
      parse_ground_response(
          json::parse(
              R"({"results": [{"boxes": [{"x":1,"y":1,"w":1,"h":1,"score":1.5}]}]})"),
          1),
      ProtocolError);
  const GroundResponse resp{{{}, {{{1, 2, 3, 4}, 0.25}}}};
  const auto round = parse_ground_response(ground_response_wire(resp), 2);
  EXPECT_EQ(round.results, resp.results);
}

TEST(GroundingTest, ReplayRoundTrip) {
  testutil::TempDir dir;
  auto store = std::make_shared<ReplayStore>(dir.path());
  const GroundRequest req{scene("donut"), {"donut", "plate"}};
  RecordingGroundingBackend rec(donut_rules(), store);
  const auto recorded = rec.ground(req);
  ReplayGroundingBackend replay(store);
  EXPECT_EQ(replay.ground(req).results, recorded.results);
  EXPECT_THROW(replay.ground({req.image, {"plate", "donut"}}), ReplayMiss);
}

// ---- images and digests ----

TEST(ImageTest, LoadReportsDimensionsAndDigest) {
  const auto img = scene("baseball");
  EXPECT_EQ(img.width, 960);
  EXPECT_EQ(img.height, 540);
  EXPECT_EQ(img.digest, sha256_hex(*img.bytes));
}

TEST(ImageTest, CropIsDeterministicAndClamped) {
  const auto img = scene("donut");
  const auto a = crop_image(img, {90, 70, 70, 70});
  const auto b = crop_image(img, {90, 70, 70, 70});
  EXPECT_EQ(a.digest, b.digest);
  EXPECT_EQ(a.width, 70);
  const auto edge = crop_image(img, {940, 530, 100, 100});
  EXPECT_EQ(edge.width, 20);
  EXPECT_EQ(edge.height, 10);
  EXPECT_THROW(crop_image(img, {2000, 10, 5, 5}), CropError);
}

TEST(ImageTest, DrawBoxesChangesDigest) {
  const auto img = scene("donut");
  const std::vector<geo::BoundingBox> boxes = {{100, 80, 50, 50}};
  const auto drawn = draw_boxes(img, boxes);
  EXPECT_NE(drawn.digest, img.digest);
  EXPECT_EQ(drawn.digest, draw_boxes(img, boxes).digest);
}

TEST(DigestTest, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(base64_encode("hello"), "aGVsbG8=");
  EXPECT_EQ(base64_decode("aGVsbG8="), "hello");
  EXPECT_THROW(base64_decode("a*b"), ProtocolError);
}

}  // namespace
}  // namespace igedet::provider
