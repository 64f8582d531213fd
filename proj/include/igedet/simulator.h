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
//
// Monte-Carlo black-box testing on annotated scenes. A tester taps one
// point per interval; the guided tester aims inside predicted boxes with
// probability p = 1 - t/T and explores uniformly otherwise.
#ifndef IGEDET_SIMULATOR_H_
#define IGEDET_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "igedet/dataset.h"
#include "igedet/geometry.h"
#include "igedet/random.h"

namespace igedet::sim {

enum class Strategy { kRandom, kGuided };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

// How the guided tester picks among predicted boxes.
enum class BoxSampling { kPerBox, kAreaWeighted };
std::string_view to_string(BoxSampling s);
BoxSampling parse_box_sampling(std::string_view name);

struct SimulationConfig {
  double duration = 60.0;  // minutes
  double interval = 1.0;   // minutes per interaction
  int runs = 5;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::kRandom;
  BoxSampling sampling = BoxSampling::kPerBox;

  // Throws UsageError on a non-positive duration or interval or runs < 1.
  void validate() const;
  int steps() const;
  nlohmann::json to_json() const;
};

struct SimScene {
  std::string scene_id;
  double width = 0.0;
  double height = 0.0;
  std::vector<geo::BoundingBox> iges;  // interactable ground truth
  // Predicted boxes for the guided tester; nullopt when the scene has no
  // detection output.
  std::optional<std::vector<geo::BoundingBox>> guidance;
};

// Builds simulator scenes for a fold. `guidance`, when given, maps scene id
// to predicted boxes; scenes absent from it get no guidance.
std::vector<SimScene> scenes_from_dataset(
    const data::DatasetVariant& dataset, const std::vector<std::string>& fold,
    const std::map<std::string, std::vector<geo::BoundingBox>>* guidance =
        nullptr);

struct InteractionPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

// 1 - t/T. Throws DomainError unless 0 <= t <= T and T > 0.
double guidance_probability(double t, double duration);

InteractionPoint next_point(const SimScene& scene, Strategy strategy,
                            BoxSampling sampling, double t, double duration,
                            Rng& rng);

bool is_effective(const InteractionPoint& p,
                  const std::vector<geo::BoundingBox>& iges);

// Fraction of IGEs containing at least one point; 1 when there are none.
double coverage(const std::vector<InteractionPoint>& points,
                const std::vector<geo::BoundingBox>& iges);

struct RunTrace {
  std::string scene_id;
  int run = 0;
  std::vector<InteractionPoint> points;
  // Cumulative after each point.
  std::vector<int> effective_count;
  std::vector<int> covered;
  std::vector<double> coverage;
};

struct SceneSummary {
  std::string scene_id;
  std::size_t iges = 0;
  bool random_fallback = false;  // guided run without detections
};

struct SimulationTrace {
  SimulationConfig config;
  std::vector<double> times;
  std::vector<SceneSummary> scenes;
  std::vector<RunTrace> runs;  // scene-major, then run index
  // Per step, averaged over runs and then over scenes.
  std::vector<double> mean_effective;
  std::vector<double> mean_coverage;
  // Mean effective count summed over scenes (fold-wide total).
  std::vector<double> total_effective;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  // Columns: t, mean_effective, total_effective, mean_coverage.
  std::string to_csv() const;
};

// Simulates every scene `config.runs` times. Each (seed, run, scene) has its
// own generator, so results do not depend on `jobs`.
SimulationTrace simulate(const std::vector<SimScene>& scenes,
                         const SimulationConfig& config, std::size_t jobs = 1);

// Side-by-side CSV of two traces with the same time grid.
std::string comparison_csv(const SimulationTrace& random,
                           const SimulationTrace& guided);

}  // namespace igedet::sim

#endif  // IGEDET_SIMULATOR_H_
