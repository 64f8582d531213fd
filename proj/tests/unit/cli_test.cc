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
#include "cli.h"

#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_util.h"

namespace igedet::cli {
namespace {

using nlohmann::json;
using testutil::fixture;
using testutil::slurp;
using testutil::TempDir;

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> mock_detect(const TempDir& tmp,
                                     const std::string& out) {
  return {"detect",
          "--dataset", fixture("pipeline/dataset.json").string(),
          "--apps", fixture("pipeline/apps.json").string(),
          "--backend", "mock",
          "--mock-script", fixture("pipeline/chat_script.json").string(),
          "--ground-rules", fixture("pipeline/grounding.json").string(),
          "--out", (tmp / out).string()};
}

// Ten apps with one to three scenes each.
std::filesystem::path ten_app_dataset(const TempDir& tmp) {
  json images = json::array(), anns = json::array();
  int img = 0, ann = 0;
  for (int a = 0; a < 10; ++a) {
    for (int k = 0; k <= a % 3; ++k) {
      ++img;
      images.push_back({{"id", img},
                        {"file_name", "s" + std::to_string(img) + ".png"},
                        {"width", 100},
                        {"height", 100},
                        {"app_id", "app" + std::to_string(a)}});
      anns.push_back({{"id", ++ann},
                      {"image_id", img},
                      {"category_id", 1 + (img % 2)},
                      {"bbox", {10, 10, 20, 20}},
                      {"interactable", true}});
    }
  }
  json doc = {{"images", images},
              {"annotations", anns},
              {"categories",
               {{{"id", 1}, {"name", "button"}}, {{"id", 2}, {"name", "lever"}}}}};
  const auto p = tmp / "ten.json";
  testutil::write_file(p, doc.dump());
  return p;
}

TEST(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run({"--help"}).code, kExitOk);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"split", "--dataset", "x.json"}).code, kExitUsage);
  TempDir tmp;
  auto args = mock_detect(tmp, "run");
  args.push_back("--ablate=context,bogus");
  EXPECT_EQ(run(args).code, kExitUsage);
}

TEST(CliTest, MissingDatasetIsDataError) {
  TempDir tmp;
  const auto r = run({"split", "--dataset", (tmp / "nope.json").string(),
                      "--out", (tmp / "s").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("nope.json"), std::string::npos);
}

TEST(CliTest, RemoteWithoutKeyFailsBeforeAnyCall) {
  TempDir tmp;
  ::unsetenv("IGEDET_CHAT_API_KEY");
  ::unsetenv("OPENAI_API_KEY");
  auto args = mock_detect(tmp, "run");
  args[6] = "remote";
  EXPECT_EQ(run(args).code, kExitUsage);
  EXPECT_FALSE(std::filesystem::exists(tmp / "run/detections"));
}

TEST(CliTest, SplitIsDeterministic) {
  TempDir tmp;
  const auto ds = ten_app_dataset(tmp);
  for (const char* dir : {"a", "b"}) {
    ASSERT_EQ(run({"split", "--dataset", ds.string(), "--split", "app",
                   "--seed", "7", "--out", (tmp / dir).string()})
                  .code,
              kExitOk);
  }
  EXPECT_EQ(slurp(tmp / "a/split.json"), slurp(tmp / "b/split.json"));
  EXPECT_TRUE(std::filesystem::exists(tmp / "a/run_config.json"));
}

TEST(CliTest, ContextSplitNeedsCategories) {
  TempDir tmp;
  const auto ds = ten_app_dataset(tmp);
  EXPECT_EQ(run({"split", "--dataset", ds.string(), "--split", "context",
                 "--out", (tmp / "c").string()})
                .code,
            kExitUsage);
  testutil::write_file(tmp / "cats.txt", "lever\n");
  EXPECT_EQ(run({"split", "--dataset", ds.string(), "--split", "context",
                 "--context-categories", (tmp / "cats.txt").string(), "--out",
                 (tmp / "c").string()})
                .code,
            kExitOk);
}

TEST(CliTest, RecordThenReplayIsIdentical) {
  TempDir tmp;
  auto rec = mock_detect(tmp, "rec");
  rec.insert(rec.end(), {"--record", "--replay-dir", (tmp / "replay").string()});
  ASSERT_EQ(run(rec).code, kExitOk);

  std::vector<std::string> rep = {
      "detect", "--dataset", fixture("pipeline/dataset.json").string(),
      "--apps", fixture("pipeline/apps.json").string(), "--backend", "replay",
      "--replay-dir", (tmp / "replay").string(), "--jobs", "3",
      "--out", (tmp / "rep").string()};
  const auto r = run(rep);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* s : {"baseball", "donut", "garden", "fishing"}) {
    const std::string f = std::string("detections/") + s + ".json";
    EXPECT_EQ(slurp(tmp / ("rec/" + f)), slurp(tmp / ("rep/" + f))) << s;
  }
  const json ledger = json::parse(slurp(tmp / "rep/run_ledger.json"));
  EXPECT_EQ(ledger["succeeded"], 4);
  EXPECT_GT(ledger["calls"]["chat_calls"].get<int>(), 0);
}

TEST(CliTest, DetectResumesAndForceRedoes) {
  TempDir tmp;
  const auto args = mock_detect(tmp, "run");
  ASSERT_EQ(run(args).code, kExitOk);
  const auto donut = tmp / "run/detections/donut.json";
  testutil::write_file(donut, "sentinel");
  std::filesystem::remove(tmp / "run/detections/garden.json");

  ASSERT_EQ(run(args).code, kExitOk);
  EXPECT_EQ(slurp(donut), "sentinel");
  EXPECT_TRUE(std::filesystem::exists(tmp / "run/detections/garden.json"));
  json ledger = json::parse(slurp(tmp / "run/run_ledger.json"));
  EXPECT_EQ(ledger["skipped_existing"], 3);
  EXPECT_EQ(ledger["succeeded"], 1);

  auto forced = args;
  forced.push_back("--force");
  ASSERT_EQ(run(forced).code, kExitOk);
  EXPECT_NE(slurp(donut), "sentinel");
}

TEST(CliTest, ReplayMissIsProviderError) {
  TempDir tmp;
  const auto r = run({"detect", "--dataset",
                      fixture("pipeline/dataset.json").string(), "--backend",
                      "replay", "--replay-dir", (tmp / "empty").string(),
                      "--out", (tmp / "run").string()});
  EXPECT_EQ(r.code, kExitProvider);
  const json ledger = json::parse(slurp(tmp / "run/run_ledger.json"));
  EXPECT_EQ(ledger["failed"].size(), 4u);
}

TEST(CliTest, EvalPerfectDetections) {
  TempDir tmp;
  const json gt = json::parse(slurp(fixture("pipeline/dataset.json")));
  std::map<int, std::string> cat;
  for (const auto& c : gt["categories"]) cat[c["id"]] = c["name"];
  std::map<std::string, json> docs;
  for (const auto& i : gt["images"]) {
    docs[i["id"]] = {{"scene_id", i["id"]}, {"detections", json::array()}};
  }
  for (const auto& a : gt["annotations"]) {
    const auto& b = a["bbox"];
    docs[a["image_id"].get<std::string>()]["detections"].push_back(
        {{"x", b[0]}, {"y", b[1]}, {"w", b[2]}, {"h", b[3]},
         {"score", 1.0}, {"category", cat[a["category_id"]]},
         {"interactable", true}});
  }
  for (const auto& [s, d] : docs) {
    testutil::write_file(tmp / ("det/" + s + ".json"), d.dump());
  }
  const auto r = run({"eval", "--dataset",
                      fixture("pipeline/dataset.json").string(),
                      "--detections", (tmp / "det").string(), "--out",
                      (tmp / "ev").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json m = json::parse(slurp(tmp / "ev/metrics.json"));
  for (const auto& t : m["thresholds"]) {
    EXPECT_DOUBLE_EQ(t["precision"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(t["recall"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(t["map"].get<double>(), 1.0);
  }
  const std::string csv = slurp(tmp / "ev/metrics.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "run,variant,split,metric,0.75,0.80,0.85,0.90,0.95");
  EXPECT_NE(csv.find("ev,semantics,all,mAP,100.00"), std::string::npos);

  // A scene without a file is counted as empty, with a warning.
  std::filesystem::remove(tmp / "det/donut.json");
  const auto r2 = run({"eval", "--dataset",
                       fixture("pipeline/dataset.json").string(),
                       "--detections", (tmp / "det").string(), "--out",
                       (tmp / "ev2").string()});
  EXPECT_EQ(r2.code, kExitOk);
  EXPECT_NE(r2.err.find("donut"), std::string::npos);

  // Report merges both runs.
  const auto r3 = run({"report", "--metrics", "full=" + (tmp / "ev").string(),
                       "--metrics", (tmp / "ev2/metrics.json").string(),
                       "--out", (tmp / "rep").string()});
  ASSERT_EQ(r3.code, kExitOk) << r3.err;
  const std::string rep = slurp(tmp / "rep/report.csv");
  EXPECT_NE(rep.find("full,semantics,all,Precision"), std::string::npos);
  EXPECT_NE(rep.find("ev2,semantics,all,Precision"), std::string::npos);

  const auto r4 = run({"eval", "--dataset",
                       fixture("pipeline/dataset.json").string(),
                       "--detections", (tmp / "det").string(),
                       "--iou-thresholds", "0.5", "--out",
                       (tmp / "ev3").string()});
  ASSERT_EQ(r4.code, kExitOk);
  EXPECT_EQ(run({"report", "--metrics", (tmp / "ev").string(), "--metrics",
                 (tmp / "ev3").string(), "--out", (tmp / "rep2").string()})
                .code,
            kExitUsage);
}

TEST(CliTest, SimulateBothStrategies) {
  TempDir tmp;
  ASSERT_EQ(run(mock_detect(tmp, "run")).code, kExitOk);
  std::filesystem::remove(tmp / "run/detections/fishing.json");
  const auto r = run({"simulate", "--dataset",
                      fixture("pipeline/dataset.json").string(),
                      "--detections", (tmp / "run").string(), "--runs", "3",
                      "--out", (tmp / "sim").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.err.find("fishing"), std::string::npos);
  for (const char* f : {"trace_random.json", "trace_random.csv",
                        "trace_guided.json", "trace_guided.csv",
                        "comparison.csv", "run_config.json"}) {
    EXPECT_TRUE(std::filesystem::exists(tmp / "sim" / f)) << f;
  }
  const json g = json::parse(slurp(tmp / "sim/trace_guided.json"));
  const json n = json::parse(slurp(tmp / "sim/trace_random.json"));
  EXPECT_GT(g["aggregate"]["total_effective"].back().get<double>(),
            n["aggregate"]["total_effective"].back().get<double>());

  EXPECT_EQ(run({"simulate", "--dataset",
                 fixture("pipeline/dataset.json").string(), "--strategy",
                 "guided", "--out", (tmp / "sim2").string()})
                .code,
            kExitUsage);
}

}  // namespace
}  // namespace igedet::cli
