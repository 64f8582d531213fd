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
#include "igedet/dataset.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "igedet/errors.h"
#include "igedet/random.h"

namespace igedet::data {

using nlohmann::json;

namespace {

std::string field(std::string_view array, std::size_t index,
                  std::string_view name) {
  return std::string(array) + "[" + std::to_string(index) + "]." +
         std::string(name);
}

// COCO ids are integers in practice; strings are accepted too.
std::string id_string(const json& v, const std::string& where) {
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_string() && !v.get<std::string>().empty()) {
    return v.get<std::string>();
  }
  throw SchemaError(where + ": expected integer or non-empty string id");
}

const json& require(const json& obj, const char* key,
                    const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(where + ": missing");
  return *it;
}

double require_number(const json& obj, const char* key,
                      const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) throw SchemaError(where + ": expected number");
  return v.get<double>();
}

std::vector<std::string> string_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw SchemaError(where + ": expected array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw SchemaError(where + ": expected string entries");
    out.push_back(e.get<std::string>());
  }
  return out;
}

// Writes an id back as an integer when it round-trips as one.
json id_json(const std::string& id) {
  if (!id.empty() && id.size() < 18 &&
      std::all_of(id.begin(), id.end(),
                  [](unsigned char c) { return std::isdigit(c); }) &&
      (id == "0" || id.front() != '0')) {
    return std::stoll(id);
  }
  return id;
}

}  // namespace

std::string_view to_string(VariantKind kind) {
  switch (kind) {
    case VariantKind::kSemantics:
      return "semantics";
    case VariantKind::kInteractability:
      return "interactability";
    case VariantKind::kContext:
      return "context";
  }
  return "semantics";
}

VariantKind parse_variant_kind(std::string_view name) {
  if (name == "semantics") return VariantKind::kSemantics;
  if (name == "interactability") return VariantKind::kInteractability;
  if (name == "context") return VariantKind::kContext;
  throw UsageError("unknown dataset variant '" + std::string(name) + "'");
}

const Scene* DatasetVariant::find_scene(std::string_view scene_id) const {
  for (const auto& s : scenes) {
    if (s.scene_id == scene_id) return &s;
  }
  return nullptr;
}

std::vector<const Annotation*> DatasetVariant::annotations_for(
    std::string_view scene_id) const {
  std::vector<const Annotation*> out;
  for (const auto& a : annotations) {
    if (a.scene_id == scene_id) out.push_back(&a);
  }
  return out;
}

std::filesystem::path DatasetVariant::resolve_image(const Scene& scene) const {
  std::filesystem::path p(scene.image_uri);
  if (p.is_absolute() || image_root.empty()) return p;
  return image_root / p;
}

DatasetVariant parse_coco(const json& doc, const LoadOptions& options) {
  if (!doc.is_object()) throw SchemaError("root: expected object");
  for (const char* key : {"images", "annotations", "categories"}) {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_array()) {
      throw SchemaError(std::string(key) + ": missing or not an array");
    }
  }

  DatasetVariant out;
  out.kind = VariantKind::kSemantics;

  std::unordered_map<std::string, std::size_t> scene_index;
  const json& images = doc["images"];
  for (std::size_t i = 0; i < images.size(); ++i) {
    const json& img = images[i];
    if (!img.is_object()) throw SchemaError(field("images", i, "") + "object");
    Scene s;
    s.scene_id = id_string(require(img, "id", field("images", i, "id")),
                           field("images", i, "id"));
    s.width = require_number(img, "width", field("images", i, "width"));
    s.height = require_number(img, "height", field("images", i, "height"));
    if (!(s.width > 0.0) || !(s.height > 0.0)) {
      throw SchemaError(field("images", i, "width/height") + ": must be > 0");
    }
    const json& fname =
        require(img, "file_name", field("images", i, "file_name"));
    if (!fname.is_string()) {
      throw SchemaError(field("images", i, "file_name") + ": expected string");
    }
    s.image_uri = fname.get<std::string>();
    if (auto it = img.find("app_id"); it != img.end()) {
      s.app_id = id_string(*it, field("images", i, "app_id"));
    }
    if (auto it = img.find("genres"); it != img.end()) {
      s.genres = string_list(*it, field("images", i, "genres"));
    }
    if (!scene_index.emplace(s.scene_id, out.scenes.size()).second) {
      throw SchemaError(field("images", i, "id") + ": duplicate id " +
                        s.scene_id);
    }
    out.scenes.push_back(std::move(s));
  }

  std::unordered_map<std::string, std::string> category_names;
  const json& categories = doc["categories"];
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const json& cat = categories[i];
    const std::string id =
        id_string(require(cat, "id", field("categories", i, "id")),
                  field("categories", i, "id"));
    const json& name =
        require(cat, "name", field("categories", i, "name"));
    if (!name.is_string() || name.get<std::string>().empty()) {
      throw SchemaError(field("categories", i, "name") +
                        ": expected non-empty string");
    }
    if (!category_names.emplace(id, name.get<std::string>()).second) {
      throw SchemaError(field("categories", i, "id") + ": duplicate id " + id);
    }
    out.category_universe.insert(name.get<std::string>());
  }

  std::unordered_set<std::string> ann_ids;
  const json& anns = doc["annotations"];
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const json& a = anns[i];
    Annotation ann;
    ann.ann_id = id_string(require(a, "id", field("annotations", i, "id")),
                           field("annotations", i, "id"));
    if (!ann_ids.insert(ann.ann_id).second) {
      throw SchemaError(field("annotations", i, "id") + ": duplicate id " +
                        ann.ann_id);
    }
    ann.scene_id =
        id_string(require(a, "image_id", field("annotations", i, "image_id")),
                  field("annotations", i, "image_id"));
    auto scene_it = scene_index.find(ann.scene_id);
    if (scene_it == scene_index.end()) {
      throw SchemaError(field("annotations", i, "image_id") +
                        ": unknown image " + ann.scene_id);
    }
    const std::string cat_id = id_string(
        require(a, "category_id", field("annotations", i, "category_id")),
        field("annotations", i, "category_id"));
    auto cat_it = category_names.find(cat_id);
    if (cat_it == category_names.end()) {
      throw SchemaError(field("annotations", i, "category_id") +
                        ": unknown category " + cat_id);
    }
    ann.category = cat_it->second;

    const json& bbox = require(a, "bbox", field("annotations", i, "bbox"));
    if (!bbox.is_array() || bbox.size() != 4 ||
        !std::all_of(bbox.begin(), bbox.end(),
                     [](const json& v) { return v.is_number(); })) {
      throw SchemaError(field("annotations", i, "bbox") +
                        ": expected [x, y, w, h]");
    }
    ann.box = {bbox[0].get<double>(), bbox[1].get<double>(),
               bbox[2].get<double>(), bbox[3].get<double>()};
    if (!ann.box.valid()) {
      throw SchemaError(field("annotations", i, "bbox") +
                        ": width and height must be > 0");
    }

    if (auto it = a.find("interactable"); it != a.end()) {
      if (!it->is_boolean()) {
        throw SchemaError(field("annotations", i, "interactable") +
                          ": expected boolean");
      }
      ann.interactable = it->get<bool>();
    }

    const Scene& scene = out.scenes[scene_it->second];
    if (!geo::within(ann.box, scene.width, scene.height)) {
      if (options.bounds == BoundsPolicy::kReject) {
        throw BoundsError("annotation " + ann.ann_id + " lies outside image " +
                          scene.scene_id);
      }
      auto clamped = geo::clamp_to(ann.box, scene.width, scene.height);
      if (!clamped) {
        throw BoundsError("annotation " + ann.ann_id +
                          " has no area inside image " + scene.scene_id);
      }
      ann.box = *clamped;
    }
    out.annotations.push_back(std::move(ann));
  }
  return out;
}

DatasetVariant load_coco(const std::filesystem::path& path,
                         const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  DatasetVariant out = parse_coco(doc, options);
  out.image_root = path.parent_path();
  return out;
}

json to_coco(const DatasetVariant& dataset) {
  json images = json::array();
  for (const auto& s : dataset.scenes) {
    json img = {{"id", id_json(s.scene_id)},
                {"width", s.width},
                {"height", s.height},
                {"file_name", s.image_uri}};
    if (!s.app_id.empty()) img["app_id"] = s.app_id;
    if (!s.genres.empty()) img["genres"] = s.genres;
    images.push_back(std::move(img));
  }

  // Labels used by annotations are always present in the category list.
  std::set<std::string> labels = dataset.category_universe;
  for (const auto& a : dataset.annotations) labels.insert(a.category);
  std::map<std::string, int> category_ids;
  json categories = json::array();
  for (const auto& name : labels) {
    const int id = static_cast<int>(category_ids.size()) + 1;
    category_ids.emplace(name, id);
    categories.push_back({{"id", id}, {"name", name}});
  }

  json anns = json::array();
  for (const auto& a : dataset.annotations) {
    anns.push_back({{"id", id_json(a.ann_id)},
                    {"image_id", id_json(a.scene_id)},
                    {"category_id", category_ids.at(a.category)},
                    {"bbox", {a.box.x, a.box.y, a.box.w, a.box.h}},
                    {"area", a.box.area()},
                    {"iscrowd", 0},
                    {"interactable", a.interactable}});
  }
  return {{"images", std::move(images)},
          {"annotations", std::move(anns)},
          {"categories", std::move(categories)}};
}

void save_coco(const DatasetVariant& dataset,
               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot write " + path.string());
  out << to_coco(dataset).dump(2) << '\n';
}

DatasetStats summarize(const DatasetVariant& dataset) {
  DatasetStats st;
  st.images = dataset.scenes.size();
  st.annotations = dataset.annotations.size();
  st.interactable_annotations = static_cast<std::size_t>(
      std::count_if(dataset.annotations.begin(), dataset.annotations.end(),
                    [](const Annotation& a) { return a.interactable; }));
  st.categories = dataset.category_universe.size();
  std::set<std::string> apps;
  for (const auto& s : dataset.scenes) apps.insert(s.app_id);
  st.apps = apps.size();
  return st;
}

AppCatalog parse_app_catalog(const json& doc) {
  if (!doc.is_object()) throw SchemaError("apps: expected object keyed by id");
  AppCatalog out;
  for (const auto& [app_id, entry] : doc.items()) {
    const std::string where = "apps." + app_id;
    if (!entry.is_object()) throw SchemaError(where + ": expected object");
    AppInfo info;
    info.app_id = app_id;
    if (auto it = entry.find("name"); it != entry.end()) {
      if (!it->is_string()) throw SchemaError(where + ".name: expected string");
      info.name = it->get<std::string>();
    }
    if (auto it = entry.find("genres"); it != entry.end()) {
      info.genres = string_list(*it, where + ".genres");
    }
    if (auto it = entry.find("store_page_text"); it != entry.end()) {
      if (!it->is_string()) {
        throw SchemaError(where + ".store_page_text: expected string");
      }
      info.store_page_text = it->get<std::string>();
    }
    out.emplace(app_id, std::move(info));
  }
  return out;
}

AppCatalog load_app_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    return parse_app_catalog(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void attach_genres(DatasetVariant& dataset, const AppCatalog& catalog) {
  for (auto& s : dataset.scenes) {
    if (!s.genres.empty()) continue;
    if (auto it = catalog.find(s.app_id); it != catalog.end()) {
      s.genres = it->second.genres;
    }
  }
}

DatasetVariant derive_variant(const DatasetVariant& base, VariantKind kind,
                              std::span<const std::string> context_categories) {
  if (base.kind != VariantKind::kSemantics) {
    throw UsageError("variants derive from the semantics dataset only");
  }
  switch (kind) {
    case VariantKind::kSemantics:
      return base;
    case VariantKind::kInteractability: {
      DatasetVariant out = base;
      out.kind = kind;
      out.annotations.clear();
      for (const auto& a : base.annotations) {
        if (!a.interactable) continue;
        Annotation b = a;
        b.category = std::string(kInteractableLabel);
        out.annotations.push_back(std::move(b));
      }
      out.category_universe = {std::string(kInteractableLabel)};
      return out;
    }
    case VariantKind::kContext: {
      if (context_categories.empty()) {
        throw UsageError("context variant requires a category list");
      }
      const std::set<std::string> wanted(context_categories.begin(),
                                         context_categories.end());
      DatasetVariant out = base;
      out.kind = kind;
      out.annotations.clear();
      bool counterparts = false;
      for (const auto& a : base.annotations) {
        if (!wanted.contains(a.category)) continue;
        counterparts = counterparts || !a.interactable;
        out.annotations.push_back(a);
      }
      if (!counterparts) {
        throw MissingCounterparts(
            "no non-interactable annotations for the sampled categories");
      }
      out.category_universe = wanted;
      return out;
    }
  }
  return base;
}

std::vector<std::string> sample_context_categories(
    const DatasetVariant& dataset, std::uint64_t seed, std::size_t count,
    std::size_t pool) {
  std::map<std::string, std::size_t> freq;
  for (const auto& a : dataset.annotations) {
    if (a.interactable) ++freq[a.category];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(),
                                                          freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a,
                                                    const auto& b) {
    return a.second > b.second;
  });
  if (ranked.size() > pool) ranked.resize(pool);

  std::vector<std::string> names;
  for (auto& r : ranked) names.push_back(std::move(r.first));
  Rng rng(seed);
  rng.shuffle(names);
  if (names.size() > count) names.resize(count);
  std::sort(names.begin(), names.end());
  return names;
}

}  // namespace igedet::data
