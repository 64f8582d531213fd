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
#include "igedet/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <set>

#include "igedet/errors.h"

namespace igedet::eval {

using nlohmann::json;

SemanticMatcher::SemanticMatcher(
    std::shared_ptr<provider::EmbeddingClient> embed, double threshold)
    : embed_(std::move(embed)), threshold_(threshold) {
  if (!embed_) throw UsageError("semantic matcher needs an embedding client");
  if (!(threshold_ >= -1.0 && threshold_ <= 1.0)) {
    throw UsageError("match threshold must lie in [-1, 1]");
  }
}

double SemanticMatcher::similarity(const std::string& a, const std::string& b) {
  return provider::cosine(embed_->embed(a), embed_->embed(b));
}

bool SemanticMatcher::match(const std::string& a, const std::string& b) {
  if (a.empty() || b.empty()) throw UsageError("cannot match an empty label");
  if (a == b) return true;
  auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const bool decision = similarity(key.first, key.second) > threshold_;
  std::unique_lock lock(mu_);
  return cache_.emplace(std::move(key), decision).first->second;
}

std::size_t SemanticMatcher::cache_size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

bool prediction_order(const Prediction& a, const Prediction& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.scene_id != b.scene_id) return a.scene_id < b.scene_id;
  if (a.box != b.box) return geo::box_less(a.box, b.box);
  return a.category < b.category;
}

void MatchLedger::merge(const MatchLedger& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
}

MatchLedger match_scene(const std::vector<Prediction>& preds,
                        const std::vector<data::Annotation>& gts,
                        double iou_thr, const CategoryMatch& same) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return prediction_order(preds[a], preds[b]);
  });

  MatchLedger out;
  std::vector<bool> claimed(gts.size(), false);
  for (const std::size_t p : order) {
    MatchRecord rec{p, std::nullopt, 0.0};
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (claimed[g]) continue;
      const double v = geo::iou(preds[p].box, gts[g].box);
      if (v <= iou_thr || (rec.gt && v <= rec.iou)) continue;
      if (!same(preds[p].category, gts[g].category)) continue;
      rec.gt = g;
      rec.iou = v;
    }
    if (rec.gt) {
      claimed[*rec.gt] = true;
      ++out.tp;
    } else {
      ++out.fp;
    }
    out.records.push_back(rec);
  }
  out.fn = static_cast<int>(std::count(claimed.begin(), claimed.end(), false));
  return out;
}

PRF1 pr_f1(int tp, int fp, int fn) {
  PRF1 r;
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / (tp + fp);
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / (tp + fn);
  if (r.precision + r.recall > 0.0) {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

std::optional<double> ap_101(const std::vector<bool>& tp_flags, int n_gt) {
  if (n_gt < 0) throw UsageError("negative ground-truth count");
  const auto total =
      static_cast<int>(std::count(tp_flags.begin(), tp_flags.end(), true));
  if (total > n_gt) {
    throw InconsistentFlags(std::to_string(total) + " matches for " +
                            std::to_string(n_gt) + " ground truths");
  }
  if (n_gt == 0) {
    if (tp_flags.empty()) return std::nullopt;
    return 0.0;
  }
  const std::size_t n = tp_flags.size();
  std::vector<int> tp(n);
  std::vector<double> precision(n);
  int running = 0;
  for (std::size_t i = 0; i < n; ++i) {
    running += tp_flags[i] ? 1 : 0;
    tp[i] = running;
    precision[i] = static_cast<double>(running) / static_cast<double>(i + 1);
  }
  // Interpolated precision: best precision at this or any later rank.
  for (std::size_t i = n; i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double sum = 0.0;
  std::size_t i = 0;
  for (int k = 0; k <= 100; ++k) {
    // recall >= k / 100, compared in integers.
    while (i < n && 100 * tp[i] < k * n_gt) ++i;
    if (i == n) break;
    sum += precision[i];
  }
  return sum / 101.0;
}

std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::kSemantics:
      return "semantics";
    case EvalMode::kInteractability:
      return "interactability";
    case EvalMode::kContext:
      return "context";
  }
  return "?";
}

EvalMode parse_eval_mode(std::string_view name) {
  if (name == "semantics") return EvalMode::kSemantics;
  if (name == "interactability") return EvalMode::kInteractability;
  if (name == "context") return EvalMode::kContext;
  throw UsageError("unknown evaluation mode: " + std::string(name));
}

EvalMode mode_for(data::VariantKind kind) {
  switch (kind) {
    case data::VariantKind::kSemantics:
      return EvalMode::kSemantics;
    case data::VariantKind::kInteractability:
      return EvalMode::kInteractability;
    case data::VariantKind::kContext:
      return EvalMode::kContext;
  }
  return EvalMode::kSemantics;
}

namespace {

// Category keys each prediction label counts toward.
std::map<std::string, std::vector<std::string>> assign_labels(
    const std::set<std::string>& pred_labels,
    const std::set<std::string>& gt_labels,
    const std::set<std::string>& universe, EvalMode mode,
    SemanticMatcher& matcher) {
  std::map<std::string, std::vector<std::string>> out;
  std::vector<std::string> absent;
  for (const auto& label : pred_labels) {
    auto& keys = out[label];
    for (const auto& c : gt_labels) {
      if (matcher.match(label, c)) keys.push_back(c);
    }
    if (!keys.empty()) continue;
    for (const auto& c : universe) {
      if (!gt_labels.contains(c) && matcher.match(label, c)) {
        keys.push_back(c);
        break;
      }
    }
    if (!keys.empty() || mode == EvalMode::kContext) continue;
    for (const auto& c : absent) {
      if (matcher.match(label, c)) {
        keys.push_back(c);
        break;
      }
    }
    if (keys.empty()) {
      absent.push_back(label);
      keys.push_back(label);
    }
  }
  return out;
}

double mean_of(const std::map<std::string, CategoryMetrics>& cats,
               double CategoryMetrics::*field) {
  if (cats.empty()) return 0.0;
  double s = 0.0;
  for (const auto& [name, m] : cats) s += m.*field;
  return s / static_cast<double>(cats.size());
}

}  // namespace

MetricsReport evaluate(const data::DatasetVariant& variant,
                       const std::vector<std::string>& fold,
                       const SceneDetections& detections,
                       SemanticMatcher& matcher, const EvalOptions& options) {
  const std::set<std::string> fold_set(fold.begin(), fold.end());
  for (const auto& [scene_id, preds] : detections) {
    if (!fold_set.contains(scene_id)) {
      throw FoldMismatch("detections for scene " + scene_id +
                         " which is not in the evaluated fold");
    }
    for (const auto& p : preds) {
      if (!p.scene_id.empty() && p.scene_id != scene_id) {
        throw FoldMismatch("prediction for scene " + p.scene_id +
                           " filed under " + scene_id);
      }
    }
  }
  for (const auto& s : fold_set) {
    if (!variant.find_scene(s)) {
      throw FoldMismatch("fold scene " + s + " is not in the dataset");
    }
  }
  const bool context = options.mode == EvalMode::kContext;

  // Predictions the method calls interactable, per scene.
  std::map<std::string, std::vector<Prediction>> preds;
  std::map<std::string, std::vector<data::Annotation>> gts;
  std::set<std::string> pred_labels, gt_labels;
  for (const auto& s : fold_set) {
    auto& ps = preds[s];
    if (auto it = detections.find(s); it != detections.end()) {
      for (Prediction p : it->second) {
        if (!p.interactable) continue;
        p.scene_id = s;
        if (options.mode == EvalMode::kInteractability) {
          p.category = std::string(data::kInteractableLabel);
        }
        if (p.category.empty()) throw SchemaError("prediction without category");
        pred_labels.insert(p.category);
        ps.push_back(std::move(p));
      }
    }
    auto& gs = gts[s];
    for (const auto* a : variant.annotations_for(s)) {
      gs.push_back(*a);
      gt_labels.insert(a->category);
    }
  }

  const auto keys_for = assign_labels(pred_labels, gt_labels,
                                      variant.category_universe, options.mode,
                                      matcher);
  std::set<std::string> categories = gt_labels;
  for (const auto& [label, keys] : keys_for) {
    categories.insert(keys.begin(), keys.end());
  }
  auto counts_toward = [&](const Prediction& p, const std::string& c) {
    const auto& keys = keys_for.at(p.category);
    return std::find(keys.begin(), keys.end(), c) != keys.end();
  };
  const CategoryMatch any = [](const std::string&, const std::string&) {
    return true;
  };

  MetricsReport report;
  report.metadata = {{"mode", std::string(to_string(options.mode))},
                     {"variant", std::string(data::to_string(variant.kind))},
                     {"matcher_threshold", matcher.threshold()},
                     {"matcher_model", matcher.model_tag()},
                     {"scenes", fold_set.size()}};
  for (const double thr : options.iou_thresholds) {
    ThresholdMetrics tm;
    tm.iou_threshold = thr;
    for (const auto& c : categories) {
      CategoryMetrics m;
      std::vector<std::pair<Prediction, bool>> ranked;
      for (const auto& s : fold_set) {
        std::vector<Prediction> ps;
        for (const auto& p : preds.at(s)) {
          if (counts_toward(p, c)) ps.push_back(p);
        }
        std::vector<data::Annotation> gs;
        for (const auto& a : gts.at(s)) {
          if (a.category == c) gs.push_back(a);
        }
        const MatchLedger ledger = match_scene(ps, gs, thr, any);
        for (const auto& rec : ledger.records) {
          // A box on a non-interactable counterpart is a false positive.
          const bool tp =
              rec.gt && (!context || gs[*rec.gt].interactable);
          ranked.emplace_back(ps[rec.pred], tp);
          ++(tp ? m.tp : m.fp);
        }
        std::vector<bool> claimed(gs.size(), false);
        for (const auto& rec : ledger.records) {
          if (rec.gt) claimed[*rec.gt] = true;
        }
        for (std::size_t g = 0; g < gs.size(); ++g) {
          const bool counts = !context || gs[g].interactable;
          if (counts) ++m.n_gt;
          if (!claimed[g]) ++(counts ? m.fn : m.tn);
        }
      }
      m.n_pred = m.tp + m.fp;
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const auto& a, const auto& b) {
                         return prediction_order(a.first, b.first);
                       });
      std::vector<bool> flags;
      for (const auto& r : ranked) flags.push_back(r.second);
      const auto ap = ap_101(flags, m.n_gt);
      if (!ap) continue;  // category not in play
      m.ap = *ap;
      m.zeroed = m.n_gt == 0;
      const PRF1 prf = pr_f1(m.tp, m.fp, m.fn);
      m.precision = prf.precision;
      m.recall = prf.recall;
      m.f1 = prf.f1;
      tm.categories.emplace(c, m);
    }
    tm.precision = mean_of(tm.categories, &CategoryMetrics::precision);
    tm.recall = mean_of(tm.categories, &CategoryMetrics::recall);
    tm.f1 = mean_of(tm.categories, &CategoryMetrics::f1);
    tm.map = mean_of(tm.categories, &CategoryMetrics::ap);
    report.thresholds.push_back(std::move(tm));
  }
  return report;
}

std::vector<Prediction> predictions_from_json(const json& doc) {
  try {
    const std::string scene_id = doc.at("scene_id").get<std::string>();
    std::vector<Prediction> out;
    for (const auto& d : doc.at("detections")) {
      Prediction p;
      p.scene_id = scene_id;
      p.box = {d.at("x").get<double>(), d.at("y").get<double>(),
               d.at("w").get<double>(), d.at("h").get<double>()};
      p.score = d.at("score").get<double>();
      p.category = d.at("category").get<std::string>();
      p.interactable = d.value("interactable", true);
      out.push_back(std::move(p));
    }
    return out;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("detection document: ") + e.what());
  }
}

namespace {

json category_json(const CategoryMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
          {"ap", m.ap},  {"tp", m.tp},  {"fp", m.fp},
          {"fn", m.fn},  {"tn", m.tn},  {"n_gt", m.n_gt},
          {"n_pred", m.n_pred}, {"zeroed", m.zeroed}};
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string threshold_label(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", t);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

json to_json(const MetricsReport& report) {
  json thresholds = json::array();
  for (const auto& t : report.thresholds) {
    json cats = json::object();
    for (const auto& [name, m] : t.categories) cats[name] = category_json(m);
    thresholds.push_back({{"iou_threshold", t.iou_threshold},
                          {"precision", t.precision},
                          {"recall", t.recall},
                          {"f1", t.f1},
                          {"map", t.map},
                          {"categories", std::move(cats)}});
  }
  return {{"metadata", report.metadata}, {"thresholds", std::move(thresholds)}};
}

MetricsReport report_from_json(const json& doc) {
  try {
    MetricsReport r;
    r.metadata = doc.value("metadata", json::object());
    for (const auto& t : doc.at("thresholds")) {
      ThresholdMetrics tm;
      tm.iou_threshold = t.at("iou_threshold").get<double>();
      tm.precision = t.at("precision").get<double>();
      tm.recall = t.at("recall").get<double>();
      tm.f1 = t.at("f1").get<double>();
      tm.map = t.at("map").get<double>();
      for (const auto& [name, c] : t.at("categories").items()) {
        CategoryMetrics m;
        m.precision = c.at("precision").get<double>();
        m.recall = c.at("recall").get<double>();
        m.f1 = c.at("f1").get<double>();
        m.ap = c.at("ap").get<double>();
        m.tp = c.value("tp", 0);
        m.fp = c.value("fp", 0);
        m.fn = c.value("fn", 0);
        m.tn = c.value("tn", 0);
        m.n_gt = c.value("n_gt", 0);
        m.n_pred = c.value("n_pred", 0);
        m.zeroed = c.value("zeroed", false);
        tm.categories.emplace(name, m);
      }
      r.thresholds.push_back(std::move(tm));
    }
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("metrics report: ") + e.what());
  }
}

std::string metrics_csv_header(const std::vector<double>& thresholds) {
  std::string out = "run,variant,split,metric";
  for (double t : thresholds) out += "," + threshold_label(t);
  return out + "\n";
}

std::string metrics_csv_rows(const MetricsReport& report,
                             const std::string& run) {
  const std::string prefix =
      csv_field(run) + "," +
      csv_field(report.metadata.value("variant", std::string())) + "," +
      csv_field(report.metadata.value("split", std::string())) + ",";
  const std::pair<const char*, double ThresholdMetrics::*> rows[] = {
      {"Precision", &ThresholdMetrics::precision},
      {"Recall", &ThresholdMetrics::recall},
      {"F1", &ThresholdMetrics::f1},
      {"mAP", &ThresholdMetrics::map}};
  std::string out;
  for (const auto& [name, field] : rows) {
    out += prefix + name;
    for (const auto& t : report.thresholds) out += "," + percent(t.*field);
    out += "\n";
  }
  return out;
}

}  // namespace igedet::eval
