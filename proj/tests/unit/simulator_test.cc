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
#include <gtest/gtest.h>

#include "igedet/errors.h"
#include "igedet/simulator.h"

namespace igedet::sim {
namespace {

SimScene quarter_scene(bool guided) {
  SimScene s{"quarter", 960, 540, {{0, 0, 480, 270}}, std::nullopt};
  if (guided) s.guidance = s.iges;
  return s;
}

// Several small elements per scene; random taps rarely reach them.
std::vector<SimScene> synthetic_fold(bool with_guidance) {
  std::vector<SimScene> fold;
  for (int i = 0; i < 6; ++i) {
    SimScene s{"scene" + std::to_string(i), 960, 540, {}, std::nullopt};
    for (int j = 0; j <= i % 3 + 1; ++j) {
      s.iges.push_back({100.0 + 180 * j, 60.0 + 70 * i, 40, 30});
    }
    if (with_guidance) s.guidance = s.iges;
    fold.push_back(std::move(s));
  }
  return fold;
}

TEST(GuidanceProbabilityTest, LinearDecay) {
  EXPECT_EQ(guidance_probability(0, 60), 1.0);
  EXPECT_EQ(guidance_probability(30, 60), 0.5);
  EXPECT_EQ(guidance_probability(60, 60), 0.0);
  EXPECT_THROW(guidance_probability(-1, 60), DomainError);
  EXPECT_THROW(guidance_probability(61, 60), DomainError);
  EXPECT_THROW(guidance_probability(0, 0), DomainError);
}

TEST(NextPointTest, RandomStaysInBounds) {
  Rng rng(1);
  const SimScene s{"s", 960, 540, {}, std::nullopt};
  for (int i = 0; i < 20000; ++i) {
    const auto p = next_point(s, Strategy::kRandom, BoxSampling::kPerBox, 5, 60, rng);
    ASSERT_GE(p.x, 0.0);
    ASSERT_LT(p.x, 960.0);
    ASSERT_GE(p.y, 0.0);
    ASSERT_LT(p.y, 540.0);
    EXPECT_EQ(p.t, 5.0);
  }
}

TEST(NextPointTest, ForcedGuidanceLandsInsideTheBox) {
  Rng rng(2);
  SimScene s{"s", 960, 540, {}, std::vector<geo::BoundingBox>{{100, 100, 50, 50}}};
  for (auto sampling : {BoxSampling::kPerBox, BoxSampling::kAreaWeighted}) {
    for (int i = 0; i < 5000; ++i) {
      const auto p = next_point(s, Strategy::kGuided, sampling, 0, 60, rng);
      ASSERT_TRUE(geo::contains({100, 100, 50, 50}, p.x, p.y));
    }
  }
}

TEST(NextPointTest, NoBoxesBehavesAsRandom) {
  SimScene guided{"s", 960, 540, {}, std::vector<geo::BoundingBox>{}};
  SimScene plain{"s", 960, 540, {}, std::nullopt};
  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) {
    const auto p = next_point(guided, Strategy::kGuided, BoxSampling::kPerBox, 0, 60, a);
    const auto q = next_point(plain, Strategy::kRandom, BoxSampling::kPerBox, 0, 60, b);
    EXPECT_EQ(p.x, q.x);
    EXPECT_EQ(p.y, q.y);
  }
}

TEST(NextPointTest, PerBoxFavoursSmallBoxes) {
  SimScene s{"s", 960, 540, {},
             std::vector<geo::BoundingBox>{{0, 0, 10, 10}, {100, 100, 300, 300}}};
  Rng rng(4);
  int small_per_box = 0, small_area = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto p = next_point(s, Strategy::kGuided, BoxSampling::kPerBox, 0, 60, rng);
    small_per_box += geo::contains({0, 0, 10, 10}, p.x, p.y);
    p = next_point(s, Strategy::kGuided, BoxSampling::kAreaWeighted, 0, 60, rng);
    small_area += geo::contains({0, 0, 10, 10}, p.x, p.y);
  }
  EXPECT_NEAR(small_per_box / double(n), 0.5, 0.02);
  EXPECT_NEAR(small_area / double(n), 100.0 / 90100.0, 0.005);
}

TEST(EffectivenessTest, HalfOpenMembership) {
  const std::vector<geo::BoundingBox> iges = {{10, 10, 20, 20}};
  EXPECT_TRUE(is_effective({0, 20, 20}, iges));
  EXPECT_TRUE(is_effective({0, 10, 10}, iges));
  EXPECT_FALSE(is_effective({0, 30, 20}, iges));
  EXPECT_FALSE(is_effective({0, 20, 30}, iges));
  EXPECT_FALSE(is_effective({0, 20, 20}, {}));
}

TEST(CoverageTest, CountsTouchedElements) {
  const std::vector<geo::BoundingBox> iges = {
      {0, 0, 10, 10}, {20, 0, 10, 10}, {40, 0, 10, 10}, {60, 0, 10, 10}};
  EXPECT_EQ(coverage({{1, 5, 5}, {2, 25, 5}, {3, 26, 6}}, iges), 0.5);
  EXPECT_EQ(coverage({}, iges), 0.0);
  EXPECT_EQ(coverage({{1, 5, 5}}, {}), 1.0);
}

TEST(SimulateTest, OnePointPerInterval) {
  SimulationConfig cfg;
  cfg.seed = 11;
  const auto tr = simulate(synthetic_fold(false), cfg);
  ASSERT_EQ(tr.times.size(), 60u);
  EXPECT_EQ(tr.times.front(), 1.0);
  EXPECT_EQ(tr.times.back(), 60.0);
  ASSERT_EQ(tr.runs.size(), 6u * 5u);
  for (const auto& r : tr.runs) {
    ASSERT_EQ(r.points.size(), 60u);
    for (std::size_t k = 1; k < 60; ++k) {
      EXPECT_LE(r.effective_count[k - 1], r.effective_count[k]);
      EXPECT_LE(r.coverage[k - 1], r.coverage[k]);
      EXPECT_EQ(r.points[k].t, double(k + 1));
    }
    EXPECT_LE(r.coverage.back(), 1.0);
  }
  cfg.interval = 2.5;
  EXPECT_EQ(simulate(synthetic_fold(false), cfg).times.size(), 24u);
}

TEST(SimulateTest, RejectsBadConfig) {
  SimulationConfig cfg;
  cfg.runs = 0;
  EXPECT_THROW(simulate({}, cfg), UsageError);
  cfg = {};
  cfg.interval = 0;
  EXPECT_THROW(simulate({}, cfg), UsageError);
  cfg = {};
  cfg.duration = -5;
  EXPECT_THROW(simulate({}, cfg), UsageError);
}

TEST(SimulateTest, SeedControlsEverything) {
  SimulationConfig cfg;
  cfg.seed = 99;
  cfg.strategy = Strategy::kGuided;
  const auto a = simulate(synthetic_fold(true), cfg, 1);
  const auto b = simulate(synthetic_fold(true), cfg, 4);
  EXPECT_EQ(a.to_json(), b.to_json());
  // Runs draw independent points.
  EXPECT_NE(a.runs[0].points[0].x, a.runs[1].points[0].x);
  cfg.seed = 100;
  EXPECT_NE(simulate(synthetic_fold(true), cfg).to_json(), a.to_json());
}

TEST(SimulateTest, AggregatesAverageRunsThenScenes) {
  SimulationConfig cfg;
  cfg.seed = 3;
  const auto tr = simulate(synthetic_fold(false), cfg);
  for (std::size_t k : {0u, 29u, 59u}) {
    double e = 0.0, c = 0.0;
    for (const auto& r : tr.runs) {
      e += r.effective_count[k];
      c += r.coverage[k];
    }
    EXPECT_NEAR(tr.mean_effective[k], e / tr.runs.size(), 1e-12);
    EXPECT_NEAR(tr.mean_coverage[k], c / tr.runs.size(), 1e-12);
    EXPECT_NEAR(tr.total_effective[k], 6 * tr.mean_effective[k], 1e-9);
  }
}

TEST(SimulateTest, RandomEffectiveRateMatchesArea) {
  SimulationConfig cfg;
  cfg.runs = 200;  // 12000 points
  cfg.seed = 2024;
  const auto tr = simulate({quarter_scene(false)}, cfg);
  const double rate = tr.mean_effective.back() / 60.0;
  EXPECT_NEAR(rate, 0.25, 0.03);
}

TEST(SimulateTest, GuidedRateFollowsMixture) {
  SimulationConfig cfg;
  cfg.runs = 400;
  cfg.seed = 7;
  cfg.strategy = Strategy::kGuided;
  const auto tr = simulate({quarter_scene(true)}, cfg);
  // Expected effective taps: sum over t of p + (1 - p) a.
  double expected = 0.0;
  for (int t = 1; t <= 60; ++t) {
    const double p = 1.0 - t / 60.0;
    expected += p + (1 - p) * 0.25;
  }
  EXPECT_NEAR(tr.mean_effective.back() / 60.0, expected / 60.0, 0.03);
}

TEST(SimulateTest, GuidedBeatsRandomCoverage) {
  SimulationConfig cfg;
  cfg.seed = 5;
  const auto random = simulate(synthetic_fold(false), cfg);
  cfg.strategy = Strategy::kGuided;
  const auto guided = simulate(synthetic_fold(true), cfg);
  EXPECT_GT(guided.mean_coverage[9], random.mean_coverage[9]);
  EXPECT_GT(guided.mean_coverage[59], random.mean_coverage[59]);
  EXPECT_GT(guided.mean_effective[59], random.mean_effective[59]);

  const std::string csv = comparison_csv(random, guided);
  EXPECT_EQ(csv.rfind("t,random_effective,guided_effective,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 61);
}

TEST(SimulateTest, MissingDetectionsFallBackToRandom) {
  SimulationConfig cfg;
  cfg.seed = 8;
  auto fold = synthetic_fold(true);
  fold[2].guidance.reset();
  cfg.strategy = Strategy::kGuided;
  const auto guided = simulate(fold, cfg);
  EXPECT_TRUE(guided.scenes[2].random_fallback);
  EXPECT_FALSE(guided.scenes[1].random_fallback);
  ASSERT_EQ(guided.warnings.size(), 1u);

  cfg.strategy = Strategy::kRandom;
  const auto random = simulate(fold, cfg);
  for (int r = 0; r < cfg.runs; ++r) {
    EXPECT_EQ(guided.runs[2 * 5 + r].effective_count,
              random.runs[2 * 5 + r].effective_count);
  }
}

TEST(SimulateTest, SceneWithoutElementsIsFullyCovered) {
  SimulationConfig cfg;
  const auto tr = simulate({SimScene{"empty", 960, 540, {}, std::nullopt}}, cfg);
  EXPECT_EQ(tr.mean_coverage.front(), 1.0);
  EXPECT_EQ(tr.mean_effective.back(), 0.0);
  EXPECT_EQ(tr.warnings.size(), 1u);
}

TEST(SimulateTest, ScenesFromDatasetUseInteractableTruth) {
  data::DatasetVariant ds;
  ds.scenes.push_back({"s1", "a", 960, 540, "s1.png", {}});
  ds.annotations.push_back({"1", "s1", {0, 0, 10, 10}, "tree", true});
  ds.annotations.push_back({"2", "s1", {50, 50, 10, 10}, "tree", false});
  std::map<std::string, std::vector<geo::BoundingBox>> guidance = {
      {"s1", {{1, 1, 5, 5}}}};
  const auto scenes = scenes_from_dataset(ds, {"s1"}, &guidance);
  ASSERT_EQ(scenes.size(), 1u);
  EXPECT_EQ(scenes[0].iges.size(), 1u);
  ASSERT_TRUE(scenes[0].guidance.has_value());
  EXPECT_EQ(scenes[0].guidance->size(), 1u);
  EXPECT_THROW(scenes_from_dataset(ds, {"nope"}), FoldMismatch);
}

TEST(SimulateTest, CsvHasOneRowPerStep) {
  SimulationConfig cfg;
  cfg.duration = 10;
  const auto tr = simulate(synthetic_fold(false), cfg);
  const std::string csv = tr.to_csv();
  EXPECT_EQ(csv.rfind("t,mean_effective,total_effective,mean_coverage\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
}

}  // namespace
}  // namespace igedet::sim
