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
// Open-vocabulary detection metrics: embedding-based category matching,
// greedy confidence-ordered box matching, P/R/F1 and 101-point AP.
#ifndef IGEDET_EVALUATION_H_
#define IGEDET_EVALUATION_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "igedet/dataset.h"
#include "igedet/embedding.h"
#include "igedet/geometry.h"

namespace igedet::eval {

inline constexpr double kDefaultMatchThreshold = 0.85;
inline const std::vector<double> kDefaultIouThresholds = {0.75, 0.80, 0.85,
                                                          0.90, 0.95};

// Two labels match when the cosine similarity of their embeddings is
// strictly greater than the threshold. Decisions are cached per unordered
// pair, so match(a, b) == match(b, a).
class SemanticMatcher {
 public:
  explicit SemanticMatcher(std::shared_ptr<provider::EmbeddingClient> embed,
                           double threshold = kDefaultMatchThreshold);

  bool match(const std::string& a, const std::string& b);
  double similarity(const std::string& a, const std::string& b);

  double threshold() const { return threshold_; }
  std::string model_tag() const { return embed_->model_tag(); }
  std::size_t cache_size() const;

 private:
  std::shared_ptr<provider::EmbeddingClient> embed_;
  double threshold_;
  mutable std::shared_mutex mu_;
  std::map<std::pair<std::string, std::string>, bool> cache_;
};

struct Prediction {
  std::string scene_id;
  geo::BoundingBox box;
  std::string category;
  double score = 0.0;
  bool interactable = true;
};

// Ranking used everywhere: score descending, then box, then category.
bool prediction_order(const Prediction& a, const Prediction& b);

struct MatchRecord {
  std::size_t pred = 0;          // index into the input predictions
  std::optional<std::size_t> gt;  // index into the input ground truths
  double iou = 0.0;
};

struct MatchLedger {
  std::vector<MatchRecord> records;  // one per prediction, in ranked order
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int tn = 0;

  void merge(const MatchLedger& other);
};

using CategoryMatch =
    std::function<bool(const std::string& pred_label, const std::string& gt_label)>;

// Each prediction, in prediction_order, claims the unclaimed ground truth
// with the highest IoU among those with a matching category and IoU strictly
// above iou_thr (ties to the lower ground-truth index).
MatchLedger match_scene(const std::vector<Prediction>& preds,
                        const std::vector<data::Annotation>& gts,
                        double iou_thr, const CategoryMatch& same);

struct PRF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Zero for any ratio whose denominator is zero.
PRF1 pr_f1(int tp, int fp, int fn);

// `tp_flags` is ranked by confidence, highest first. Returns nullopt when
// there is nothing to score (no ground truth and no predictions), 0 when
// there are predictions but no ground truth. Throws InconsistentFlags if
// more flags are set than there are ground truths.
std::optional<double> ap_101(const std::vector<bool>& tp_flags, int n_gt);

enum class EvalMode { kSemantics, kInteractability, kContext };
std::string_view to_string(EvalMode mode);
EvalMode parse_eval_mode(std::string_view name);
EvalMode mode_for(data::VariantKind kind);

struct CategoryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ap = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int tn = 0;
  int n_gt = 0;
  int n_pred = 0;
  bool zeroed = false;  // predictions for a category without ground truth
};

struct ThresholdMetrics {
  double iou_threshold = 0.0;
  std::map<std::string, CategoryMetrics> categories;
  // Means over `categories`, zeroed ones included.
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double map = 0.0;
};

struct MetricsReport {
  std::vector<ThresholdMetrics> thresholds;
  nlohmann::json metadata = nlohmann::json::object();
};

struct EvalOptions {
  EvalMode mode = EvalMode::kSemantics;
  std::vector<double> iou_thresholds = kDefaultIouThresholds;
};

// Predictions keyed by scene id.
using SceneDetections = std::map<std::string, std::vector<Prediction>>;

// Evaluates detections against the fold's scenes of `variant`. Scenes in
// the fold without detections count as empty. Throws FoldMismatch for a
// detection keyed to a scene outside the fold.
MetricsReport evaluate(const data::DatasetVariant& variant,
                       const std::vector<std::string>& fold,
                       const SceneDetections& detections,
                       SemanticMatcher& matcher, const EvalOptions& options = {});

// Reads one per-scene detection document ({scene_id, detections: [...]}).
std::vector<Prediction> predictions_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport report_from_json(const nlohmann::json& doc);

// Rows: Precision, Recall, F1, mAP; columns: the IoU thresholds. Values are
// percentages with two decimals. `run` labels the rows.
std::string metrics_csv_header(const std::vector<double>& thresholds);
std::string metrics_csv_rows(const MetricsReport& report, const std::string& run);

}  // namespace igedet::eval

#endif  // IGEDET_EVALUATION_H_
