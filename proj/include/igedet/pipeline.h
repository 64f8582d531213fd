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
// Three-stage detection of interactable elements in one scene:
//
//   context   PI.1 (store page) and PI.2 (scene image)
//   mining    PII.1 -> PII.2 -> PII.3 -> PII.4, then one grounding call
//   reflect   PII.5 per detected box, PII.6 per miss, PII.7 advisor
//   classify  PIII per verified candidate
//
// Mining, grounding and reflection repeat until the advisor is confident,
// no new candidate appears, or max_iterations is reached.
#ifndef IGEDET_PIPELINE_H_
#define IGEDET_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "igedet/chat.h"
#include "igedet/errors.h"
#include "igedet/geometry.h"
#include "igedet/grounding.h"
#include "igedet/image.h"
#include "igedet/prompts.h"

namespace igedet::pipeline {

struct GlobalContext {
  std::string app_name;
  std::vector<std::string> genres;
  std::string content_theme;
  std::vector<std::string> device_support;
  std::string gameplay;
  std::vector<std::string> interaction_mechanisms;
  std::vector<std::string> language;

  static GlobalContext from_json(const nlohmann::json& v);
  nlohmann::json to_json() const;
  // Stable text block used to fill prompt slots.
  std::string render() const;
};

struct LocalContext {
  std::string scene_summary;
};

struct SceneContext {
  GlobalContext global;
  LocalContext local;
  std::vector<std::string> warnings;
};

struct DimensionQA {
  std::string dimension;
  std::string question;
  std::string answer;
};

struct CharacteristicsDescription {
  std::string candidate_name;
  std::vector<DimensionQA> dimensions;
  std::string cd_text;
};

enum class CandidateStatus { kUnground, kDetected, kVerified, kRejected, kMissed };
std::string_view to_string(CandidateStatus s);

struct CandidateState {
  CharacteristicsDescription cd;
  std::vector<geo::ScoredBox> boxes;           // as grounded
  std::vector<geo::ScoredBox> verified_boxes;  // subset confirmed by PII.5
  CandidateStatus status = CandidateStatus::kUnground;
  std::string advisor_notes;  // PII.5 / PII.6 reasons and crop notes
  int iteration = 0;
  bool reflected = false;
};

struct AdvisorVerdict {
  bool confident = false;
  std::string concerns;
};

struct ReflectionOutcome {
  AdvisorVerdict verdict;
  // PII.6 reasons for candidates kept as missed, in ledger order.
  std::vector<std::string> miss_feedback;
};

struct Classification {
  bool interactable = true;
  std::string rationale;
  std::string warning;  // set when the answer could not be parsed
};

struct Provenance {
  std::string cd_text;
  int iterations_used = 0;
  std::string warning;
};

struct Detection {
  geo::BoundingBox box;
  std::string category;
  bool interactable = true;
  double confidence = 0.0;
  Provenance provenance;
};

struct Ablation {
  bool context = false;
  bool reflection = false;
  bool classify = false;
};

struct PipelineConfig {
  int max_iterations = 3;
  Ablation ablate;
  std::uint64_t seed = 0;
  std::size_t demonstrations = 3;
  double crop_margin = 0.1;
  double max_area_fraction = geo::kDefaultMaxAreaFraction;
  double nms_iou = geo::kDefaultNmsIouThreshold;
  provider::DecodeOptions decode;
};

struct Providers {
  std::shared_ptr<provider::ChatClient> chat;
  std::shared_ptr<provider::GroundingClient> ground;
  std::shared_ptr<const provider::DemonstrationPool> demos;
};

struct SceneResult {
  std::string scene_id;
  std::vector<Detection> detections;
  int iterations = 0;
  provider::CallLedger calls;
  std::vector<std::string> warnings;
  std::vector<CandidateState> ledger;
};

class Orienter {
 public:
  Orienter(Providers providers, PipelineConfig config);

  const PipelineConfig& config() const { return config_; }

  SceneContext comprehend_context(const std::string& store_text,
                                  const ImagePayload& image,
                                  provider::CallLedger& calls) const;

  // `feedback` is empty on the first pass.
  std::vector<CharacteristicsDescription> mine_characteristics(
      const SceneContext& ctx, const ImagePayload& image,
      const std::string& feedback, provider::CallLedger& calls) const;

  std::vector<CandidateState> detect_candidates(
      const std::vector<CharacteristicsDescription>& cds,
      const ImagePayload& image, int iteration,
      provider::CallLedger& calls) const;

  // Verifies detected and reviews missed states not yet reflected on, then
  // asks the advisor about the whole ledger.
  ReflectionOutcome reflect(std::vector<CandidateState>& ledger,
                            const ImagePayload& image, const SceneContext& ctx,
                            provider::CallLedger& calls) const;

  std::vector<Classification> classify_interactability(
      const std::vector<const CandidateState*>& verified,
      const SceneContext& ctx, const ImagePayload& image,
      const std::string& scene_id, provider::CallLedger& calls) const;

  SceneResult run(const std::string& scene_id, const ImagePayload& image,
                  const std::string& store_text) const;

 private:
  Providers providers_;
  PipelineConfig config_;
};

struct SceneJob {
  std::string scene_id;
  std::filesystem::path image;
  std::string store_text;
};

struct SceneFailure {
  std::string scene_id;
  ErrorClass error_class = ErrorClass::kProvider;
  std::string message;
};

struct BatchOutcome {
  std::vector<SceneResult> results;  // successes, in job order
  std::vector<SceneFailure> failures;
};

// Runs scenes on up to `jobs` threads. A failing scene is recorded and the
// batch continues. `on_done` is called (serialized) as each scene succeeds.
BatchOutcome run_batch(const Orienter& orienter,
                       const std::vector<SceneJob>& scenes, std::size_t jobs,
                       const std::function<void(const SceneResult&)>& on_done = {});

nlohmann::json to_json(const Detection& d);
nlohmann::json to_json(const SceneResult& r);
// Per-scene output document; stable for a given result.
std::string detection_document(const SceneResult& r);

}  // namespace igedet::pipeline

#endif  // IGEDET_PIPELINE_H_
