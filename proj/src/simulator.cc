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
#include "igedet/simulator.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "igedet/errors.h"

namespace igedet::sim {

using nlohmann::json;

std::string_view to_string(Strategy s) {
  return s == Strategy::kGuided ? "guided" : "random";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "random") return Strategy::kRandom;
  if (name == "guided") return Strategy::kGuided;
  throw UsageError("unknown strategy: " + std::string(name));
}

std::string_view to_string(BoxSampling s) {
  return s == BoxSampling::kAreaWeighted ? "area-weighted" : "per-box";
}

BoxSampling parse_box_sampling(std::string_view name) {
  if (name == "per-box") return BoxSampling::kPerBox;
  if (name == "area-weighted") return BoxSampling::kAreaWeighted;
  throw UsageError("unknown box sampling: " + std::string(name));
}

void SimulationConfig::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw UsageError("duration must be positive");
  }
  if (!(interval > 0.0) || !std::isfinite(interval)) {
    throw UsageError("interval must be positive");
  }
  if (runs < 1) throw UsageError("runs must be at least 1");
  if (steps() < 1) throw UsageError("interval longer than the duration");
}

int SimulationConfig::steps() const {
  return static_cast<int>(std::floor(duration / interval + 1e-9));
}

json SimulationConfig::to_json() const {
  return {{"duration", duration},
          {"interval", interval},
          {"runs", runs},
          {"seed", seed},
          {"strategy", std::string(sim::to_string(strategy))},
          {"sampling", std::string(sim::to_string(sampling))}};
}

std::vector<SimScene> scenes_from_dataset(
    const data::DatasetVariant& dataset, const std::vector<std::string>& fold,
    const std::map<std::string, std::vector<geo::BoundingBox>>* guidance) {
  std::vector<SimScene> out;
  for (const auto& id : fold) {
    const data::Scene* s = dataset.find_scene(id);
    if (!s) throw FoldMismatch("fold scene " + id + " is not in the dataset");
    SimScene sc{id, s->width, s->height, {}, std::nullopt};
    for (const auto* a : dataset.annotations_for(id)) {
      if (a->interactable) sc.iges.push_back(a->box);
    }
    if (guidance) {
      if (auto it = guidance->find(id); it != guidance->end()) {
        sc.guidance = it->second;
      }
    }
    out.push_back(std::move(sc));
  }
  return out;
}

double guidance_probability(double t, double duration) {
  if (!(duration > 0.0)) throw DomainError("duration must be positive");
  if (!(t >= 0.0 && t <= duration)) {
    throw DomainError("t = " + std::to_string(t) + " outside [0, " +
                      std::to_string(duration) + "]");
  }
  return 1.0 - t / duration;
}

namespace {

// Uniform in [lo, hi); guards the rounding case lo + (hi - lo) * u == hi.
double uniform_half_open(Rng& rng, double lo, double hi) {
  const double v = rng.uniform(lo, hi);
  return v < hi ? v : std::nextafter(hi, lo);
}

InteractionPoint inside(const geo::BoundingBox& b, double t, Rng& rng) {
  const double x = uniform_half_open(rng, b.x, b.right());
  const double y = uniform_half_open(rng, b.y, b.bottom());
  return {t, x, y};
}

}  // namespace

InteractionPoint next_point(const SimScene& scene, Strategy strategy,
                            BoxSampling sampling, double t, double duration,
                            Rng& rng) {
  const geo::BoundingBox full{0, 0, scene.width, scene.height};
  if (strategy == Strategy::kRandom || !scene.guidance) {
    return inside(full, t, rng);
  }
  std::vector<geo::BoundingBox> boxes;
  for (const auto& b : *scene.guidance) {
    if (auto c = geo::clamp_to(b, scene.width, scene.height); c && c->valid()) {
      boxes.push_back(*c);
    }
  }
  const double p = guidance_probability(t, duration);
  if (boxes.empty() || !rng.bernoulli(p)) return inside(full, t, rng);
  if (sampling == BoxSampling::kPerBox) {
    return inside(boxes[rng.index(boxes.size())], t, rng);
  }
  double total = 0.0;
  for (const auto& b : boxes) total += b.area();
  double r = rng.uniform(0.0, total);
  for (const auto& b : boxes) {
    if (r < b.area()) return inside(b, t, rng);
    r -= b.area();
  }
  return inside(boxes.back(), t, rng);
}

bool is_effective(const InteractionPoint& p,
                  const std::vector<geo::BoundingBox>& iges) {
  return std::any_of(iges.begin(), iges.end(), [&](const geo::BoundingBox& b) {
    return geo::contains(b, p.x, p.y);
  });
}

double coverage(const std::vector<InteractionPoint>& points,
                const std::vector<geo::BoundingBox>& iges) {
  if (iges.empty()) return 1.0;
  std::size_t covered = 0;
  for (const auto& b : iges) {
    if (std::any_of(points.begin(), points.end(), [&](const InteractionPoint& p) {
          return geo::contains(b, p.x, p.y);
        })) {
      ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(iges.size());
}

namespace {

RunTrace run_one(const SimScene& scene, const SimulationConfig& cfg, int run) {
  Rng rng(derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(run),
                                  "simulate"),
                      fnv1a64(scene.scene_id), "scene"));
  RunTrace tr;
  tr.scene_id = scene.scene_id;
  tr.run = run;
  std::vector<bool> hit(scene.iges.size(), false);
  int effective = 0, covered = 0;
  for (int k = 1; k <= cfg.steps(); ++k) {
    const double t = std::min(k * cfg.interval, cfg.duration);
    const auto p = next_point(scene, cfg.strategy, cfg.sampling, t,
                              cfg.duration, rng);
    bool eff = false;
    for (std::size_t g = 0; g < scene.iges.size(); ++g) {
      if (!geo::contains(scene.iges[g], p.x, p.y)) continue;
      eff = true;
      if (!hit[g]) {
        hit[g] = true;
        ++covered;
      }
    }
    effective += eff ? 1 : 0;
    tr.points.push_back(p);
    tr.effective_count.push_back(effective);
    tr.covered.push_back(covered);
    tr.coverage.push_back(
        scene.iges.empty()
            ? 1.0
            : static_cast<double>(covered) /
                  static_cast<double>(scene.iges.size()));
  }
  return tr;
}

}  // namespace

SimulationTrace simulate(const std::vector<SimScene>& scenes,
                         const SimulationConfig& config, std::size_t jobs) {
  config.validate();
  SimulationTrace out;
  out.config = config;
  const int steps = config.steps();
  for (int k = 1; k <= steps; ++k) {
    out.times.push_back(std::min(k * config.interval, config.duration));
  }
  for (const auto& s : scenes) {
    SceneSummary sum{s.scene_id, s.iges.size(), false};
    if (config.strategy == Strategy::kGuided && !s.guidance) {
      sum.random_fallback = true;
      out.warnings.push_back("scene " + s.scene_id +
                             ": no detections, guided runs fall back to random");
    }
    if (s.iges.empty()) {
      out.warnings.push_back("scene " + s.scene_id +
                             ": no interactable elements, coverage fixed at 1");
    }
    out.scenes.push_back(std::move(sum));
  }

  const std::size_t n_runs = static_cast<std::size_t>(config.runs);
  const std::size_t total = scenes.size() * n_runs;
  out.runs.resize(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      out.runs[i] = run_one(scenes[i / n_runs], config, static_cast<int>(i % n_runs));
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, total));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  out.mean_effective.assign(steps, 0.0);
  out.mean_coverage.assign(steps, 0.0);
  out.total_effective.assign(steps, 0.0);
  if (scenes.empty()) return out;
  const double ns = static_cast<double>(scenes.size());
  const double nr = static_cast<double>(n_runs);
  for (int k = 0; k < steps; ++k) {
    // Runs first, then scenes.
    double eff_a = 0.0, cov_a = 0.0;
    for (std::size_t s = 0; s < scenes.size(); ++s) {
      double e = 0.0, c = 0.0;
      for (std::size_t r = 0; r < n_runs; ++r) {
        e += out.runs[s * n_runs + r].effective_count[k];
        c += out.runs[s * n_runs + r].coverage[k];
      }
      eff_a += e / nr;
      cov_a += c / nr;
    }
    eff_a /= ns;
    cov_a /= ns;
    // Scenes first, then runs.
    double eff_b = 0.0, cov_b = 0.0;
    for (std::size_t r = 0; r < n_runs; ++r) {
      double e = 0.0, c = 0.0;
      for (std::size_t s = 0; s < scenes.size(); ++s) {
        e += out.runs[s * n_runs + r].effective_count[k];
        c += out.runs[s * n_runs + r].coverage[k];
      }
      eff_b += e / ns;
      cov_b += c / ns;
    }
    eff_b /= nr;
    cov_b /= nr;
    if (std::abs(eff_a - eff_b) > 1e-12 || std::abs(cov_a - cov_b) > 1e-12) {
      throw std::logic_error("simulation aggregates disagree at step " +
                             std::to_string(k + 1));
    }
    out.mean_effective[k] = eff_a;
    out.mean_coverage[k] = cov_a;
    out.total_effective[k] = eff_a * ns;
  }
  return out;
}

json SimulationTrace::to_json() const {
  json scenes_json = json::array();
  const std::size_t n_runs = static_cast<std::size_t>(config.runs);
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    json runs_json = json::array();
    for (std::size_t r = 0; r < n_runs && s * n_runs + r < runs.size(); ++r) {
      const RunTrace& tr = runs[s * n_runs + r];
      json pts = json::array();
      for (const auto& p : tr.points) pts.push_back({p.t, p.x, p.y});
      runs_json.push_back({{"run", tr.run},
                           {"points", std::move(pts)},
                           {"effective_count", tr.effective_count},
                           {"covered", tr.covered},
                           {"coverage", tr.coverage}});
    }
    scenes_json.push_back({{"scene_id", scenes[s].scene_id},
                           {"iges", scenes[s].iges},
                           {"random_fallback", scenes[s].random_fallback},
                           {"runs", std::move(runs_json)}});
  }
  json doc = {{"config", config.to_json()},
              {"times", times},
              {"aggregate",
               {{"mean_effective", mean_effective},
                {"total_effective", total_effective},
                {"mean_coverage", mean_coverage}}},
              {"scenes", std::move(scenes_json)}};
  if (!warnings.empty()) doc["warnings"] = warnings;
  return doc;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string SimulationTrace::to_csv() const {
  std::string out = "t,mean_effective,total_effective,mean_coverage\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    out += fmt(times[k]) + "," + fmt(mean_effective[k]) + "," +
           fmt(total_effective[k]) + "," + fmt(mean_coverage[k]) + "\n";
  }
  return out;
}

std::string comparison_csv(const SimulationTrace& random,
                           const SimulationTrace& guided) {
  if (random.times != guided.times) {
    throw UsageError("traces have different time grids");
  }
  std::string out =
      "t,random_effective,guided_effective,random_coverage,guided_coverage\n";
  for (std::size_t k = 0; k < random.times.size(); ++k) {
    out += fmt(random.times[k]) + "," + fmt(random.mean_effective[k]) + "," +
           fmt(guided.mean_effective[k]) + "," + fmt(random.mean_coverage[k]) +
           "," + fmt(guided.mean_coverage[k]) + "\n";
  }
  return out;
}

}  // namespace igedet::sim
