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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "igedet/dataset.h"
#include "igedet/embedding.h"
#include "igedet/errors.h"
#include "igedet/evaluation.h"
#include "igedet/pipeline.h"
#include "igedet/remote.h"
#include "igedet/replay.h"
#include "igedet/simulator.h"
#include "igedet/split.h"

namespace igedet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

fs::path default_asset_dir() {
  if (const char* env = std::getenv("IGEDET_ASSETS"); env && *env) return env;
  return IGEDET_DEFAULT_ASSET_DIR;
}

int exit_code(ErrorClass c) {
  switch (c) {
    case ErrorClass::kUsage:
      return kExitUsage;
    case ErrorClass::kData:
      return kExitData;
    case ErrorClass::kProvider:
      return kExitProvider;
  }
  return kExitData;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw MissingFile("cannot write " + tmp.string());
    out << text;
    if (!out) throw MissingFile("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

// JSON array of strings, or one entry per non-empty line.
std::vector<std::string> read_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<std::string> out;
  if (first != std::string::npos && text[first] == '[') {
    try {
      return json::parse(text).get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw SchemaError(path.string() + ": " + e.what());
    }
  }
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

struct Common {
  std::string out;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output directory")->required();
  cmd->add_option("--jobs", c.jobs, "Parallel workers")
      ->check(CLI::PositiveNumber);
}

// Snapshot written next to every command's outputs.
void write_run_config(const fs::path& out, const std::string& command,
                      const std::vector<std::string>& args, json options) {
  write_json(out / "run_config.json", {{"tool", "igedet"},
                                       {"version", kVersion},
                                       {"command", command},
                                       {"argv", args},
                                       {"options", std::move(options)}});
}

std::vector<std::string> fold_scenes(const data::DatasetVariant& ds,
                                     const std::string& split_file,
                                     const std::string& fold) {
  if (split_file.empty()) {
    std::vector<std::string> all;
    for (const auto& s : ds.scenes) all.push_back(s.scene_id);
    return all;
  }
  const data::Split split = data::load_split(split_file);
  auto scenes = split.fold(fold);
  for (const auto& s : scenes) {
    if (!ds.find_scene(s)) {
      throw FoldMismatch("split scene " + s + " is not in the dataset");
    }
  }
  return scenes;
}

// ---- split ----

struct SplitOptions {
  Common common;
  std::string dataset, apps, kind = "app", categories;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitOptions& o, const std::vector<std::string>& args,
              std::ostream& out) {
  const auto kind = data::parse_split_kind(o.kind);
  std::vector<std::string> cats;
  if (!o.categories.empty()) cats = read_list(o.categories);
  if (kind == data::SplitKind::kContextSensitive && cats.empty()) {
    throw UsageError("context split needs --context-categories");
  }
  auto ds = data::load_coco(o.dataset);
  if (!o.apps.empty()) data::attach_genres(ds, data::load_app_catalog(o.apps));
  const auto split = data::make_split(ds, kind, o.seed, cats);

  const fs::path dir(o.common.out);
  fs::create_directories(dir);
  write_json(dir / "split.json", data::to_json(split));
  write_run_config(dir, "split", args,
                   {{"dataset", o.dataset},
                    {"apps", o.apps},
                    {"split", o.kind},
                    {"seed", o.seed},
                    {"context_categories", cats}});
  out << "split " << o.kind << ": train " << split.train.size() << ", val "
      << split.val.size() << ", test " << split.test.size() << "\n";
  return kExitOk;
}

// ---- detect ----

struct DetectOptions {
  Common common;
  std::string dataset, apps, split_file, fold = "test";
  std::string backend = "replay", replay_dir, mock_script, ground_rules;
  bool record = false;
  std::string prompts, demos;
  int max_iterations = 3;
  std::vector<std::string> ablate;
  std::uint64_t seed = 0;
  bool force = false;
  std::size_t concurrency = 4;
  double cost_per_chat = 0.0, cost_per_ground = 0.0;
};

pipeline::Providers make_providers(const DetectOptions& o) {
  const fs::path assets = default_asset_dir();
  auto registry = std::make_shared<const provider::PromptRegistry>(
      provider::PromptRegistry::load_dir(o.prompts.empty() ? assets / "prompts"
                                                           : fs::path(o.prompts)));
  auto demos = std::make_shared<const provider::DemonstrationPool>(
      provider::DemonstrationPool::load(
          o.demos.empty() ? assets / "demos" / "classification.json"
                          : fs::path(o.demos)));

  std::shared_ptr<provider::ChatBackend> chat;
  std::shared_ptr<provider::GroundingBackend> ground;
  std::shared_ptr<provider::ReplayStore> store;
  if (!o.replay_dir.empty()) {
    store = std::make_shared<provider::ReplayStore>(o.replay_dir);
  }
  if (o.backend == "replay") {
    if (!store) throw UsageError("--backend replay needs --replay-dir");
    if (o.record) throw UsageError("--record needs a live or mock backend");
    chat = std::make_shared<provider::ReplayChatBackend>(store);
    ground = std::make_shared<provider::ReplayGroundingBackend>(store);
  } else if (o.backend == "mock") {
    if (o.mock_script.empty() || o.ground_rules.empty()) {
      throw UsageError("--backend mock needs --mock-script and --ground-rules");
    }
    chat = provider::ScriptedChatBackend::load(o.mock_script);
    ground = provider::SyntheticGroundingBackend::load(o.ground_rules);
  } else if (o.backend == "remote") {
    const auto ep = provider::chat_endpoint_from_env();
    if (ep.api_key.empty()) {
      throw UsageError(
          "--backend remote needs IGEDET_CHAT_API_KEY or OPENAI_API_KEY");
    }
    chat = provider::make_remote_chat_backend(ep);
    ground = provider::make_http_grounding_backend(
        provider::ground_endpoint_from_env());
  } else {
    throw UsageError("unknown backend: " + o.backend);
  }
  if (o.record) {
    if (!store) throw UsageError("--record needs --replay-dir");
    chat = std::make_shared<provider::RecordingChatBackend>(chat, store);
    ground = std::make_shared<provider::RecordingGroundingBackend>(ground, store);
  }
  return {std::make_shared<provider::ChatClient>(registry, chat, o.concurrency),
          std::make_shared<provider::GroundingClient>(ground, o.concurrency),
          demos};
}

int cmd_detect(const DetectOptions& o, const std::vector<std::string>& args,
               std::ostream& out, std::ostream& err) {
  pipeline::PipelineConfig cfg;
  if (o.max_iterations < 1) throw UsageError("--max-iterations must be >= 1");
  cfg.max_iterations = o.max_iterations;
  cfg.seed = o.seed;
  for (const auto& a : o.ablate) {
    if (a == "context") {
      cfg.ablate.context = true;
    } else if (a == "reflection") {
      cfg.ablate.reflection = true;
    } else if (a == "classify") {
      cfg.ablate.classify = true;
    } else {
      throw UsageError("unknown --ablate stage: " + a);
    }
  }
  // Everything is validated before the first provider call.
  const pipeline::Orienter orienter(make_providers(o), cfg);
  const auto ds = data::load_coco(o.dataset);
  data::AppCatalog apps;
  if (!o.apps.empty()) apps = data::load_app_catalog(o.apps);
  const auto scenes = fold_scenes(ds, o.split_file, o.fold);

  const fs::path dir(o.common.out);
  const fs::path det_dir = dir / "detections";
  fs::create_directories(det_dir);
  write_run_config(
      dir, "detect", args,
      {{"dataset", o.dataset},
       {"apps", o.apps},
       {"split_file", o.split_file},
       {"fold", o.split_file.empty() ? "all" : o.fold},
       {"backend", o.backend},
       {"replay_dir", o.replay_dir},
       {"record", o.record},
       {"mock_script", o.mock_script},
       {"ground_rules", o.ground_rules},
       {"prompts", o.prompts.empty() ? (default_asset_dir() / "prompts").string()
                                     : o.prompts},
       {"max_iterations", o.max_iterations},
       {"ablate", o.ablate},
       {"seed", o.seed},
       {"jobs", o.common.jobs},
       {"concurrency", o.concurrency},
       {"force", o.force}});

  std::vector<pipeline::SceneJob> jobs;
  std::size_t skipped = 0;
  for (const auto& id : scenes) {
    if (!o.force && fs::exists(det_dir / (id + ".json"))) {
      ++skipped;
      continue;
    }
    const data::Scene* s = ds.find_scene(id);
    std::string store_text;
    if (auto it = apps.find(s->app_id); it != apps.end()) {
      store_text = it->second.store_page_text;
    }
    jobs.push_back({id, ds.resolve_image(*s), store_text});
  }

  json per_scene = json::object();
  provider::CallLedger total;
  const auto outcome = pipeline::run_batch(
      orienter, jobs, o.common.jobs, [&](const pipeline::SceneResult& r) {
        write_text(det_dir / (r.scene_id + ".json"),
                   pipeline::detection_document(r));
        per_scene[r.scene_id] = r.calls.to_json();
        total.merge(r.calls);
        for (const auto& w : r.warnings) {
          err << "igedet: warning: " << r.scene_id << ": " << w << "\n";
        }
      });

  json failures = json::array();
  int code = kExitOk;
  for (const auto& f : outcome.failures) {
    err << "igedet: error: scene " << f.scene_id << ": " << f.message << "\n";
    failures.push_back({{"scene_id", f.scene_id},
                        {"error_class", exit_code(f.error_class)},
                        {"message", f.message}});
    code = std::max(code, exit_code(f.error_class));
  }
  write_json(dir / "run_ledger.json",
             {{"scenes", scenes.size()},
              {"skipped_existing", skipped},
              {"succeeded", outcome.results.size()},
              {"failed", failures},
              {"calls", total.to_json()},
              {"per_scene", per_scene},
              {"estimated_cost",
               {{"per_chat_call", o.cost_per_chat},
                {"per_ground_call", o.cost_per_ground},
                {"total", o.cost_per_chat * total.chat_calls +
                              o.cost_per_ground * total.ground_calls}}}});
  out << "detect: " << outcome.results.size() << " scenes done, " << skipped
      << " skipped, " << outcome.failures.size() << " failed; "
      << total.chat_calls << " chat calls, " << total.ground_calls
      << " grounding calls\n";
  return code;
}

// ---- eval ----

struct EvalCmdOptions {
  Common common;
  std::string dataset, variant = "semantics", categories, split_file,
                       fold = "test", detections;
  std::string embed_backend = "hash", embed_table, replay_dir;
  bool record = false;
  std::vector<double> iou_thresholds = eval::kDefaultIouThresholds;
  double match_threshold = eval::kDefaultMatchThreshold;
};

std::shared_ptr<provider::EmbeddingBackend> make_embedder(
    const EvalCmdOptions& o) {
  std::shared_ptr<provider::EmbeddingBackend> b;
  std::shared_ptr<provider::ReplayStore> store;
  if (!o.replay_dir.empty()) {
    store = std::make_shared<provider::ReplayStore>(o.replay_dir);
  }
  if (o.embed_backend == "hash") {
    b = std::make_shared<provider::HashEmbedder>();
  } else if (o.embed_backend == "table") {
    if (o.embed_table.empty()) throw UsageError("--embed-backend table needs --embed-table");
    b = provider::TableEmbedder::load(o.embed_table);
  } else if (o.embed_backend == "remote") {
    const auto ep = provider::embed_endpoint_from_env();
    if (ep.api_key.empty()) {
      throw UsageError("--embed-backend remote needs IGEDET_EMBED_API_KEY or OPENAI_API_KEY");
    }
    b = provider::make_remote_embedding_backend(ep);
  } else if (o.embed_backend == "replay") {
    if (!store) throw UsageError("--embed-backend replay needs --replay-dir");
    b = std::make_shared<provider::ReplayEmbeddingBackend>(
        store, provider::embed_endpoint_from_env().model);
  } else {
    throw UsageError("unknown embedding backend: " + o.embed_backend);
  }
  if (o.record) {
    if (!store) throw UsageError("--record needs --replay-dir");
    b = std::make_shared<provider::RecordingEmbeddingBackend>(b, store);
  }
  return b;
}

// Reads <dir>/<scene>.json detection documents. Scenes without a file are
// left out of the map.
std::map<std::string, std::vector<eval::Prediction>> read_detections(
    const fs::path& dir) {
  if (!fs::is_directory(dir)) throw MissingFile(dir.string());
  std::map<std::string, std::vector<eval::Prediction>> out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const json doc = read_json(f);
    auto preds = eval::predictions_from_json(doc);
    const std::string id = doc.at("scene_id").get<std::string>();
    if (out.contains(id)) throw SchemaError("duplicate detections for " + id);
    out.emplace(id, std::move(preds));
  }
  return out;
}

fs::path detections_dir(const std::string& arg) {
  const fs::path p(arg);
  // Accept a detect output directory as well as its detections/ folder.
  if (fs::is_directory(p / "detections")) return p / "detections";
  return p;
}

int cmd_eval(const EvalCmdOptions& o, const std::vector<std::string>& args,
             std::ostream& out, std::ostream& err) {
  const auto kind = data::parse_variant_kind(o.variant);
  std::vector<std::string> cats;
  if (!o.categories.empty()) cats = read_list(o.categories);
  if (o.iou_thresholds.empty()) throw UsageError("no IoU thresholds");
  for (double t : o.iou_thresholds) {
    if (!(t >= 0.0 && t < 1.0)) throw UsageError("IoU thresholds lie in [0, 1)");
  }
  const auto base = data::load_coco(o.dataset);
  const auto ds = kind == data::VariantKind::kSemantics
                      ? base
                      : data::derive_variant(base, kind, cats);
  const auto fold = fold_scenes(ds, o.split_file, o.fold);
  const auto dets = read_detections(detections_dir(o.detections));
  for (const auto& s : fold) {
    if (!dets.contains(s)) {
      err << "igedet: warning: no detections for scene " << s
          << "; counted as empty\n";
    }
  }
  eval::SemanticMatcher matcher(
      std::make_shared<provider::EmbeddingClient>(make_embedder(o)),
      o.match_threshold);
  eval::EvalOptions opt;
  opt.mode = eval::mode_for(kind);
  opt.iou_thresholds = o.iou_thresholds;
  auto report = eval::evaluate(ds, fold, dets, matcher, opt);
  std::string split_name = "all";
  if (!o.split_file.empty()) {
    split_name = std::string(data::to_string(data::load_split(o.split_file).kind));
  }
  report.metadata["split"] = split_name;
  report.metadata["fold"] = o.split_file.empty() ? "all" : o.fold;

  const fs::path dir(o.common.out);
  fs::create_directories(dir);
  write_json(dir / "metrics.json", eval::to_json(report));
  write_text(dir / "metrics.csv",
             eval::metrics_csv_header(o.iou_thresholds) +
                 eval::metrics_csv_rows(report, dir.filename().string()));
  write_run_config(dir, "eval", args,
                   {{"dataset", o.dataset},
                    {"variant", o.variant},
                    {"context_categories", cats},
                    {"split_file", o.split_file},
                    {"fold", o.fold},
                    {"detections", o.detections},
                    {"embed_backend", o.embed_backend},
                    {"embed_table", o.embed_table},
                    {"replay_dir", o.replay_dir},
                    {"iou_thresholds", o.iou_thresholds},
                    {"match_threshold", o.match_threshold}});
  for (const auto& t : report.thresholds) {
    out << "IoU " << t.iou_threshold << ": P " << t.precision << " R "
        << t.recall << " F1 " << t.f1 << " mAP " << t.map << "\n";
  }
  return kExitOk;
}

// ---- simulate ----

struct SimulateOptions {
  Common common;
  std::string dataset, split_file, fold = "test", detections;
  std::string strategy = "both", sampling = "per-box";
  double duration = 60.0, interval = 1.0;
  int runs = 5;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateOptions& o, const std::vector<std::string>& args,
                 std::ostream& out, std::ostream& err) {
  sim::SimulationConfig cfg;
  cfg.duration = o.duration;
  cfg.interval = o.interval;
  cfg.runs = o.runs;
  cfg.seed = o.seed;
  cfg.sampling = sim::parse_box_sampling(o.sampling);
  cfg.validate();
  std::vector<sim::Strategy> strategies;
  if (o.strategy == "both") {
    strategies = {sim::Strategy::kRandom, sim::Strategy::kGuided};
  } else {
    strategies = {sim::parse_strategy(o.strategy)};
  }
  const bool guided = std::find(strategies.begin(), strategies.end(),
                                sim::Strategy::kGuided) != strategies.end();
  if (guided && o.detections.empty()) {
    throw UsageError("guided simulation needs --detections");
  }
  const auto ds = data::load_coco(o.dataset);
  const auto fold = fold_scenes(ds, o.split_file, o.fold);
  std::map<std::string, std::vector<geo::BoundingBox>> guidance;
  if (guided) {
    const std::set<std::string> in_fold(fold.begin(), fold.end());
    for (const auto& [id, preds] : read_detections(detections_dir(o.detections))) {
      if (!in_fold.contains(id)) continue;
      auto& boxes = guidance[id];
      for (const auto& p : preds) {
        if (p.interactable) boxes.push_back(p.box);
      }
    }
  }
  const auto scenes = sim::scenes_from_dataset(ds, fold, &guidance);

  const fs::path dir(o.common.out);
  fs::create_directories(dir);
  std::map<sim::Strategy, sim::SimulationTrace> traces;
  for (const auto s : strategies) {
    cfg.strategy = s;
    auto tr = sim::simulate(scenes, cfg, o.common.jobs);
    const std::string name(sim::to_string(s));
    for (const auto& w : tr.warnings) {
      err << "igedet: warning: " << name << ": " << w << "\n";
    }
    write_json(dir / ("trace_" + name + ".json"), tr.to_json());
    write_text(dir / ("trace_" + name + ".csv"), tr.to_csv());
    out << name << ": effective " << tr.total_effective.back()
        << " (fold total), coverage " << tr.mean_coverage.back() << "\n";
    traces.emplace(s, std::move(tr));
  }
  if (traces.size() == 2) {
    write_text(dir / "comparison.csv",
               sim::comparison_csv(traces.at(sim::Strategy::kRandom),
                                   traces.at(sim::Strategy::kGuided)));
  }
  write_run_config(dir, "simulate", args,
                   {{"dataset", o.dataset},
                    {"split_file", o.split_file},
                    {"fold", o.fold},
                    {"detections", o.detections},
                    {"strategy", o.strategy},
                    {"sampling", o.sampling},
                    {"duration", o.duration},
                    {"interval", o.interval},
                    {"runs", o.runs},
                    {"seed", o.seed},
                    {"jobs", o.common.jobs}});
  return kExitOk;
}

// ---- report ----

struct ReportOptions {
  Common common;
  std::vector<std::string> metrics;  // [label=]path
};

int cmd_report(const ReportOptions& o, const std::vector<std::string>& args,
               std::ostream& out) {
  if (o.metrics.empty()) throw UsageError("report needs at least one --metrics");
  std::string csv;
  json runs = json::array();
  std::optional<std::vector<double>> grid;
  for (const auto& arg : o.metrics) {
    std::string label, path = arg;
    if (auto eq = arg.find('='); eq != std::string::npos) {
      label = arg.substr(0, eq);
      path = arg.substr(eq + 1);
    }
    fs::path p(path);
    if (fs::is_directory(p)) p /= "metrics.json";
    if (label.empty()) label = p.parent_path().filename().string();
    const auto report = eval::report_from_json(read_json(p));
    std::vector<double> thr;
    json averages = json::array();
    for (const auto& t : report.thresholds) {
      thr.push_back(t.iou_threshold);
      averages.push_back({{"iou_threshold", t.iou_threshold},
                          {"precision", t.precision},
                          {"recall", t.recall},
                          {"f1", t.f1},
                          {"map", t.map}});
    }
    if (!grid) {
      grid = thr;
      csv = eval::metrics_csv_header(thr);
    } else if (*grid != thr) {
      throw UsageError(p.string() + ": IoU thresholds differ from earlier runs");
    }
    csv += eval::metrics_csv_rows(report, label);
    runs.push_back({{"run", label},
                    {"source", p.string()},
                    {"metadata", report.metadata},
                    {"averages", std::move(averages)}});
  }
  const fs::path dir(o.common.out);
  fs::create_directories(dir);
  write_text(dir / "report.csv", csv);
  write_json(dir / "report.json", {{"runs", runs}});
  write_run_config(dir, "report", args, {{"metrics", o.metrics}});
  out << csv;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Interactable GUI element detection for VR scenes", "igedet"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  SplitOptions split;
  auto* s = app.add_subcommand("split", "Partition scenes into train/val/test");
  add_common(s, split.common);
  s->add_option("--dataset", split.dataset, "COCO annotation file")
      ->required();
  s->add_option("--apps", split.apps, "App catalog (genres, store pages)");
  s->add_option("--split", split.kind, "app | genre | context")
      ->check(CLI::IsMember({"app", "genre", "context"}));
  s->add_option("--seed", split.seed);
  s->add_option("--context-categories", split.categories,
                "Category list (JSON array or one per line)");

  DetectOptions det;
  auto* d = app.add_subcommand("detect", "Run the detection pipeline");
  add_common(d, det.common);
  d->add_option("--dataset", det.dataset)->required();
  d->add_option("--apps", det.apps, "App catalog with store page text");
  d->add_option("--split-file", det.split_file, "Split manifest (default: all scenes)");
  d->add_option("--fold", det.fold)->check(CLI::IsMember({"train", "val", "test"}));
  d->add_option("--backend", det.backend, "remote | replay | mock")
      ->check(CLI::IsMember({"remote", "replay", "mock"}));
  d->add_option("--replay-dir", det.replay_dir);
  d->add_flag("--record", det.record, "Record every response into --replay-dir");
  d->add_option("--mock-script", det.mock_script, "Scripted chat responses");
  d->add_option("--ground-rules", det.ground_rules, "Synthetic grounding rules");
  d->add_option("--prompts", det.prompts, "Prompt template directory");
  d->add_option("--demos", det.demos, "Classification demonstration pool");
  d->add_option("--max-iterations", det.max_iterations);
  d->add_option("--ablate", det.ablate, "context, reflection and/or classify")
      ->delimiter(',');
  d->add_option("--seed", det.seed);
  d->add_flag("--force", det.force, "Redo scenes that already have output");
  d->add_option("--concurrency", det.concurrency, "Requests in flight per backend")
      ->check(CLI::PositiveNumber);
  d->add_option("--cost-per-chat-call", det.cost_per_chat);
  d->add_option("--cost-per-ground-call", det.cost_per_ground);

  EvalCmdOptions ev;
  auto* e = app.add_subcommand("eval", "Score detections against ground truth");
  add_common(e, ev.common);
  e->add_option("--dataset", ev.dataset)->required();
  e->add_option("--variant", ev.variant, "semantics | interactability | context")
      ->check(CLI::IsMember({"semantics", "interactability", "context"}));
  e->add_option("--context-categories", ev.categories);
  e->add_option("--split-file", ev.split_file);
  e->add_option("--fold", ev.fold)->check(CLI::IsMember({"train", "val", "test"}));
  e->add_option("--detections", ev.detections)->required();
  e->add_option("--embed-backend", ev.embed_backend, "hash | table | remote | replay")
      ->check(CLI::IsMember({"hash", "table", "remote", "replay"}));
  e->add_option("--embed-table", ev.embed_table);
  e->add_option("--replay-dir", ev.replay_dir);
  e->add_flag("--record", ev.record);
  e->add_option("--iou-thresholds", ev.iou_thresholds)->delimiter(',');
  e->add_option("--match-threshold", ev.match_threshold);

  SimulateOptions si;
  auto* m = app.add_subcommand("simulate", "Simulate random and guided testing");
  add_common(m, si.common);
  m->add_option("--dataset", si.dataset)->required();
  m->add_option("--split-file", si.split_file);
  m->add_option("--fold", si.fold)->check(CLI::IsMember({"train", "val", "test"}));
  m->add_option("--detections", si.detections);
  m->add_option("--strategy", si.strategy, "random | guided | both")
      ->check(CLI::IsMember({"random", "guided", "both"}));
  m->add_option("--sampling", si.sampling, "per-box | area-weighted")
      ->check(CLI::IsMember({"per-box", "area-weighted"}));
  m->add_option("--duration", si.duration, "Minutes");
  m->add_option("--interval", si.interval, "Minutes per interaction");
  m->add_option("--runs", si.runs);
  m->add_option("--seed", si.seed);

  ReportOptions rep;
  auto* r = app.add_subcommand("report", "Merge metrics of several runs");
  add_common(r, rep.common);
  r->add_option("--metrics", rep.metrics, "[label=]metrics.json or eval dir")
      ->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "igedet: " << ex.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*s) return cmd_split(split, args, out);
    if (*d) return cmd_detect(det, args, out, err);
    if (*e) return cmd_eval(ev, args, out, err);
    if (*m) return cmd_simulate(si, args, out, err);
    if (*r) return cmd_report(rep, args, out);
  } catch (const Error& ex) {
    err << "igedet: error: " << ex.what() << "\n";
    return exit_code(ex.error_class());
  } catch (const fs::filesystem_error& ex) {
    err << "igedet: error: " << ex.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& ex) {
    err << "igedet: error: " << ex.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace igedet::cli
