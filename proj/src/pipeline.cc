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
#include "igedet/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <mutex>
#include <set>
#include <thread>

#include "igedet/errors.h"
#include "igedet/random.h"

namespace igedet::pipeline {

using nlohmann::json;
using provider::CallLedger;
using provider::ChatRequest;

namespace {

std::string fold_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::vector<std::string> strings(const json& v) {
  std::vector<std::string> out;
  if (!v.is_array()) return out;
  for (const auto& e : v) {
    if (e.is_string()) out.push_back(e.get<std::string>());
  }
  return out;
}

// Entry of a structured {"candidates": [...]} answer whose name matches,
// falling back to position.
const json* entry_for(const json& doc, const std::string& name,
                      std::size_t index) {
  const json& arr = doc.at("candidates");
  const std::string key = fold_case(name);
  for (const auto& e : arr) {
    if (fold_case(e.at("name").get<std::string>()) == key) return &e;
  }
  return index < arr.size() ? &arr[index] : nullptr;
}

// Field `value_key` of the pair for `dimension` in `pairs`, else position.
std::string pair_value(const json* entry, const char* list_key,
                       const char* value_key, const std::string& dimension,
                       std::size_t index) {
  if (!entry || !entry->contains(list_key)) return {};
  const json& pairs = entry->at(list_key);
  const std::string key = fold_case(dimension);
  for (const auto& p : pairs) {
    if (fold_case(p.at("dimension").get<std::string>()) == key) {
      return p.at(value_key).get<std::string>();
    }
  }
  return index < pairs.size() ? pairs[index].at(value_key).get<std::string>()
                              : std::string();
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string ledger_text(const std::vector<CandidateState>& ledger) {
  std::string out;
  for (const auto& s : ledger) {
    out += "- " + s.cd.candidate_name + " [" + std::string(to_string(s.status)) +
           ", " + std::to_string(s.status == CandidateStatus::kVerified
                                     ? s.verified_boxes.size()
                                     : s.boxes.size()) +
           " box(es)]: " + s.cd.cd_text;
    if (!s.advisor_notes.empty()) out += " | notes: " + s.advisor_notes;
    out += "\n";
  }
  return out.empty() ? "None" : out;
}

void append_note(std::string& notes, const std::string& note) {
  if (note.empty()) return;
  if (!notes.empty()) notes += "; ";
  notes += note;
}

}  // namespace

std::string_view to_string(CandidateStatus s) {
  switch (s) {
    case CandidateStatus::kUnground:
      return "unground";
    case CandidateStatus::kDetected:
      return "detected";
    case CandidateStatus::kVerified:
      return "verified";
    case CandidateStatus::kRejected:
      return "rejected";
    case CandidateStatus::kMissed:
      return "missed";
  }
  return "unground";
}

GlobalContext GlobalContext::from_json(const json& v) {
  GlobalContext g;
  g.app_name = v.value("app_name", "");
  g.genres = strings(v.value("genres", json::array()));
  g.content_theme = v.value("content_theme", "");
  g.device_support = strings(v.value("device_support", json::array()));
  g.gameplay = v.value("gameplay", "");
  g.interaction_mechanisms =
      strings(v.value("interaction_mechanisms", json::array()));
  g.language = strings(v.value("language", json::array()));
  return g;
}

json GlobalContext::to_json() const {
  return {{"app_name", app_name},
          {"genres", genres},
          {"content_theme", content_theme},
          {"device_support", device_support},
          {"gameplay", gameplay},
          {"interaction_mechanisms", interaction_mechanisms},
          {"language", language}};
}

std::string GlobalContext::render() const {
  return "app name: " + app_name + "\ngenres: " + join(genres, ", ") +
         "\ncontent theme: " + content_theme +
         "\ndevice support: " + join(device_support, ", ") +
         "\ngameplay: " + gameplay +
         "\ninteraction mechanisms: " + join(interaction_mechanisms, ", ") +
         "\nlanguage: " + join(language, ", ");
}

Orienter::Orienter(Providers providers, PipelineConfig config)
    : providers_(std::move(providers)), config_(config) {
  if (!providers_.chat || !providers_.ground) {
    throw UsageError("pipeline needs chat and grounding providers");
  }
  if (config_.max_iterations < 1) {
    throw UsageError("max_iterations must be at least 1");
  }
}

SceneContext Orienter::comprehend_context(const std::string& store_text,
                                          const ImagePayload& image,
                                          CallLedger& calls) const {
  SceneContext ctx;
  if (trim(store_text).empty()) {
    ctx.warnings.push_back("empty store page text; global context left empty");
  } else {
    ctx.global = GlobalContext::from_json(providers_.chat->chat_structured(
        {"PI.1", {{"store_text", store_text}}, {}, {}, config_.decode}, &calls));
  }
  const json local = providers_.chat->chat_structured(
      {"PI.2", {{"global_context", ctx.global.render()}}, {image}, {},
       config_.decode},
      &calls);
  ctx.local.scene_summary = local.at("scene_summary").get<std::string>();
  return ctx;
}

std::vector<CharacteristicsDescription> Orienter::mine_characteristics(
    const SceneContext& ctx, const ImagePayload& image,
    const std::string& feedback, CallLedger& calls) const {
  const std::string global = ctx.global.render();
  const std::string& summary = ctx.local.scene_summary;
  const std::string fb = feedback.empty() ? "None" : feedback;
  auto& chat = *providers_.chat;

  const json cand = chat.chat_structured(
      {"PII.1",
       {{"global_context", global}, {"scene_summary", summary}, {"feedback", fb}},
       {image}, {}, config_.decode},
      &calls);
  std::vector<std::string> names;
  std::set<std::string> seen_names;
  for (const auto& c : cand.at("candidates")) {
    const std::string n = c.at("name").get<std::string>();
    if (seen_names.insert(fold_case(n)).second) names.push_back(n);
  }
  if (names.empty()) return {};

  std::string name_list;
  for (const auto& n : names) name_list += "- " + n + "\n";
  const json dims = chat.chat_structured(
      {"PII.2",
       {{"global_context", global},
        {"scene_summary", summary},
        {"candidates", name_list}},
       {image}, {}, config_.decode},
      &calls);

  std::vector<CharacteristicsDescription> cds(names.size());
  std::string dim_text;
  for (std::size_t i = 0; i < names.size(); ++i) {
    cds[i].candidate_name = names[i];
    if (const json* e = entry_for(dims, names[i], i)) {
      for (const auto& d : e->at("dimensions")) {
        cds[i].dimensions.push_back({d.get<std::string>(), "", ""});
      }
    }
    std::vector<std::string> dn;
    for (const auto& d : cds[i].dimensions) dn.push_back(d.dimension);
    dim_text += "- " + names[i] + ": " + join(dn, ", ") + "\n";
  }

  const json qs = chat.chat_structured(
      {"PII.3", {{"scene_summary", summary}, {"dimensions", dim_text}}, {}, {},
       config_.decode},
      &calls);
  std::string q_text;
  for (std::size_t i = 0; i < cds.size(); ++i) {
    const json* e = entry_for(qs, names[i], i);
    q_text += names[i] + ":\n";
    for (std::size_t k = 0; k < cds[i].dimensions.size(); ++k) {
      auto& d = cds[i].dimensions[k];
      d.question = pair_value(e, "questions", "question", d.dimension, k);
      q_text += "  [" + d.dimension + "] " + d.question + "\n";
    }
  }

  const json ans = chat.chat_structured(
      {"PII.4",
       {{"scene_summary", summary}, {"questions", q_text}, {"feedback", fb}},
       {image}, {}, config_.decode},
      &calls);

  std::vector<CharacteristicsDescription> out;
  std::set<std::string> seen_cd;
  for (std::size_t i = 0; i < cds.size(); ++i) {
    const json* e = entry_for(ans, names[i], i);
    std::vector<std::string> parts;
    for (std::size_t k = 0; k < cds[i].dimensions.size(); ++k) {
      auto& d = cds[i].dimensions[k];
      d.answer = trim(pair_value(e, "answers", "answer", d.dimension, k));
      if (!d.answer.empty()) parts.push_back(d.answer);
    }
    cds[i].cd_text = parts.empty() ? cds[i].candidate_name : join(parts, " ");
    if (seen_cd.insert(fold_case(cds[i].cd_text)).second) {
      out.push_back(std::move(cds[i]));
    }
  }
  return out;
}

std::vector<CandidateState> Orienter::detect_candidates(
    const std::vector<CharacteristicsDescription>& cds,
    const ImagePayload& image, int iteration, CallLedger& calls) const {
  std::vector<CandidateState> states;
  if (cds.empty()) return states;
  provider::GroundRequest req{image, {}};
  for (const auto& cd : cds) req.descriptions.push_back(cd.cd_text);
  const auto resp = providers_.ground->ground(req, &calls);
  for (std::size_t i = 0; i < cds.size(); ++i) {
    CandidateState s;
    s.cd = cds[i];
    s.boxes = resp.results[i];
    s.status = s.boxes.empty() ? CandidateStatus::kMissed
                               : CandidateStatus::kDetected;
    s.iteration = iteration;
    states.push_back(std::move(s));
  }
  return states;
}

ReflectionOutcome Orienter::reflect(std::vector<CandidateState>& ledger,
                                    const ImagePayload& image,
                                    const SceneContext& ctx,
                                    CallLedger& calls) const {
  ReflectionOutcome out;
  auto& chat = *providers_.chat;

  std::vector<geo::BoundingBox> drawn;
  for (const auto& s : ledger) {
    for (const auto& b : s.boxes) drawn.push_back(b.box);
  }
  std::optional<ImagePayload> visualized;

  for (auto& s : ledger) {
    if (s.reflected) continue;
    s.reflected = true;
    if (s.status == CandidateStatus::kDetected) {
      for (const auto& b : s.boxes) {
        ImagePayload crop;
        try {
          crop = crop_image(image, geo::pad(b.box, config_.crop_margin));
        } catch (const CropError& e) {
          append_note(s.advisor_notes, std::string("crop failed: ") + e.what());
          continue;
        }
        const json v = chat.chat_structured(
            {"PII.5",
             {{"candidate_name", s.cd.candidate_name}, {"cd_text", s.cd.cd_text}},
             {crop, image}, {}, config_.decode},
            &calls);
        if (v.at("verdict") == "match") {
          s.verified_boxes.push_back(b);
        } else {
          append_note(s.advisor_notes, v.at("reason").get<std::string>());
        }
      }
      s.status = s.verified_boxes.empty() ? CandidateStatus::kRejected
                                          : CandidateStatus::kVerified;
    } else if (s.status == CandidateStatus::kMissed) {
      if (!visualized) visualized = draw_boxes(image, drawn);
      const json v = chat.chat_structured(
          {"PII.6",
           {{"candidate_name", s.cd.candidate_name},
            {"cd_text", s.cd.cd_text},
            {"scene_summary", ctx.local.scene_summary}},
           {*visualized}, {}, config_.decode},
          &calls);
      const std::string reason = v.at("reason").get<std::string>();
      append_note(s.advisor_notes, reason);
      if (v.at("verdict") == "hallucination") {
        s.status = CandidateStatus::kRejected;
      } else {
        out.miss_feedback.push_back(s.cd.candidate_name + ": " +
                                    (reason.empty() ? "missed" : reason));
      }
    }
  }

  const json a = chat.chat_structured(
      {"PII.7",
       {{"scene_summary", ctx.local.scene_summary},
        {"ledger", ledger_text(ledger)}},
       {image}, {}, config_.decode},
      &calls);
  out.verdict.confident = a.at("confident").get<bool>();
  out.verdict.concerns = a.at("concerns").get<std::string>();
  return out;
}

std::vector<Classification> Orienter::classify_interactability(
    const std::vector<const CandidateState*>& verified, const SceneContext& ctx,
    const ImagePayload& image, const std::string& scene_id,
    CallLedger& calls) const {
  std::vector<Classification> out;
  if (verified.empty()) return out;
  std::vector<std::string> demos;
  if (providers_.demos) {
    Rng rng(derive_seed(config_.seed, fnv1a64(scene_id), "demonstrations"));
    demos = providers_.demos->select(rng, config_.demonstrations);
  }
  const std::string global = ctx.global.render();
  for (const CandidateState* s : verified) {
    Classification c;
    try {
      const json v = providers_.chat->chat_structured(
          {"PIII",
           {{"global_context", global},
            {"scene_summary", ctx.local.scene_summary},
            {"candidate_name", s->cd.candidate_name},
            {"cd_text", s->cd.cd_text}},
           {image}, demos, config_.decode},
          &calls);
      c.interactable = v.at("interactable").get<bool>();
      c.rationale = v.at("rationale").get<std::string>();
    } catch (const ParseError& e) {
      c.interactable = true;
      c.warning = "classification unparseable after retries; defaulted to "
                  "interactable";
    }
    out.push_back(std::move(c));
  }
  return out;
}

SceneResult Orienter::run(const std::string& scene_id, const ImagePayload& image,
                          const std::string& store_text) const {
  SceneResult result;
  result.scene_id = scene_id;
  CallLedger& calls = result.calls;

  SceneContext ctx;
  if (!config_.ablate.context) {
    ctx = comprehend_context(store_text, image, calls);
    result.warnings = ctx.warnings;
  }

  auto& ledger = result.ledger;
  std::set<std::string> known;
  std::string feedback;
  const int max_iter = config_.ablate.reflection ? 1 : config_.max_iterations;
  for (int it = 1; it <= max_iter; ++it) {
    result.iterations = it;
    auto cds = mine_characteristics(ctx, image, feedback, calls);
    std::vector<CharacteristicsDescription> fresh;
    for (auto& cd : cds) {
      if (known.insert(fold_case(cd.cd_text)).second) {
        fresh.push_back(std::move(cd));
      }
    }
    if (fresh.empty()) break;
    auto states = detect_candidates(fresh, image, it, calls);
    for (auto& s : states) ledger.push_back(std::move(s));

    if (config_.ablate.reflection) {
      for (auto& s : ledger) {
        if (s.status == CandidateStatus::kDetected) {
          s.status = CandidateStatus::kVerified;
          s.verified_boxes = s.boxes;
        }
      }
      break;
    }
    const ReflectionOutcome r = reflect(ledger, image, ctx, calls);
    if (r.verdict.confident) break;
    std::vector<std::string> lines;
    for (const auto& m : r.miss_feedback) lines.push_back("- " + m);
    if (!trim(r.verdict.concerns).empty()) {
      lines.push_back("Advisor concerns: " + trim(r.verdict.concerns));
    }
    feedback = join(lines, "\n");
  }

  std::vector<const CandidateState*> verified;
  for (const auto& s : ledger) {
    if (s.status == CandidateStatus::kVerified) verified.push_back(&s);
  }
  std::vector<Classification> classes;
  if (config_.ablate.classify) {
    classes.assign(verified.size(), Classification{true, "", ""});
  } else {
    classes = classify_interactability(verified, ctx, image, scene_id, calls);
  }

  std::vector<Detection> raw;
  std::vector<geo::ScoredBox> scored;
  for (std::size_t i = 0; i < verified.size(); ++i) {
    const CandidateState& s = *verified[i];
    for (const auto& b : s.verified_boxes) {
      Detection d;
      d.box = b.box;
      d.confidence = b.score;
      d.category = s.cd.candidate_name;
      d.interactable = classes[i].interactable;
      d.provenance = {s.cd.cd_text, s.iteration, classes[i].warning};
      raw.push_back(std::move(d));
      scored.push_back(b);
    }
  }
  const auto kept_idx = geo::filter_oversized_indices(
      scored, image.width, image.height, config_.max_area_fraction);
  std::vector<geo::ScoredBox> kept;
  for (auto i : kept_idx) kept.push_back(scored[i]);
  for (auto j : geo::nms_indices(kept, config_.nms_iou)) {
    result.detections.push_back(raw[kept_idx[j]]);
  }
  return result;
}

BatchOutcome run_batch(const Orienter& orienter,
                       const std::vector<SceneJob>& scenes, std::size_t jobs,
                       const std::function<void(const SceneResult&)>& on_done) {
  std::vector<std::optional<SceneResult>> results(scenes.size());
  std::vector<std::optional<SceneFailure>> failures(scenes.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < scenes.size(); i = next++) {
      const SceneJob& job = scenes[i];
      try {
        SceneResult r = orienter.run(job.scene_id, load_image(job.image),
                                     job.store_text);
        if (on_done) {
          std::lock_guard lock(done_mu);
          on_done(r);
        }
        results[i] = std::move(r);
      } catch (const Error& e) {
        failures[i] = SceneFailure{job.scene_id, e.error_class(), e.what()};
      } catch (const std::exception& e) {
        failures[i] = SceneFailure{job.scene_id, ErrorClass::kData, e.what()};
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(jobs, scenes.size()));
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  BatchOutcome out;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    if (results[i]) out.results.push_back(std::move(*results[i]));
    if (failures[i]) out.failures.push_back(std::move(*failures[i]));
  }
  return out;
}

json to_json(const Detection& d) {
  json prov = {{"cd_text", d.provenance.cd_text},
               {"iterations_used", d.provenance.iterations_used}};
  if (!d.provenance.warning.empty()) prov["warning"] = d.provenance.warning;
  return {{"x", d.box.x},
          {"y", d.box.y},
          {"w", d.box.w},
          {"h", d.box.h},
          {"score", d.confidence},
          {"category", d.category},
          {"interactable", d.interactable},
          {"provenance", prov}};
}

json to_json(const SceneResult& r) {
  json dets = json::array();
  for (const auto& d : r.detections) dets.push_back(to_json(d));
  json stats = r.calls.to_json();
  stats.erase("embed_calls");
  stats["iterations"] = r.iterations;
  json out = {{"scene_id", r.scene_id}, {"detections", dets}, {"stats", stats}};
  if (!r.warnings.empty()) out["warnings"] = r.warnings;
  return out;
}

std::string detection_document(const SceneResult& r) {
  return to_json(r).dump(2) + "\n";
}

}  // namespace igedet::pipeline
