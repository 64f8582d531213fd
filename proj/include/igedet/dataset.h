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
// COCO-format interactable GUI element datasets.
//
// Images carry the usual COCO fields plus an optional "app_id" (string or
// integer) and "genres" list. Annotations carry an optional boolean
// "interactable" attribute; an absent flag means the element is interactable.
#ifndef IGEDET_DATASET_H_
#define IGEDET_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "igedet/geometry.h"

namespace igedet::data {

enum class VariantKind { kSemantics, kInteractability, kContext };

std::string_view to_string(VariantKind kind);
VariantKind parse_variant_kind(std::string_view name);

// Category label used by the interactability variant.
inline constexpr std::string_view kInteractableLabel = "interactable";

struct Scene {
  std::string scene_id;
  std::string app_id;
  double width = 0.0;
  double height = 0.0;
  std::string image_uri;  // as written in the file; see resolve_image()
  std::vector<std::string> genres;
};

struct Annotation {
  std::string ann_id;
  std::string scene_id;
  geo::BoundingBox box;
  std::string category;
  bool interactable = true;
};

// Entry of the app-metadata sidecar: a JSON object keyed by app_id whose
// values are {"name", "genres", "store_page_text"}.
struct AppInfo {
  std::string app_id;
  std::string name;
  std::vector<std::string> genres;
  std::string store_page_text;
};

using AppCatalog = std::map<std::string, AppInfo>;

struct DatasetVariant {
  VariantKind kind = VariantKind::kSemantics;
  std::vector<Scene> scenes;
  std::vector<Annotation> annotations;
  std::set<std::string> category_universe;
  // Directory relative image URIs are resolved against.
  std::filesystem::path image_root;

  const Scene* find_scene(std::string_view scene_id) const;
  std::vector<const Annotation*> annotations_for(
      std::string_view scene_id) const;
  std::filesystem::path resolve_image(const Scene& scene) const;
};

enum class BoundsPolicy { kReject, kClamp };

struct LoadOptions {
  BoundsPolicy bounds = BoundsPolicy::kReject;
};

// Throws MissingFile, SchemaError (naming the offending field) or
// BoundsError (naming the annotation).
DatasetVariant load_coco(const std::filesystem::path& path,
                         const LoadOptions& options = {});
DatasetVariant parse_coco(const nlohmann::json& doc,
                          const LoadOptions& options = {});

nlohmann::json to_coco(const DatasetVariant& dataset);
void save_coco(const DatasetVariant& dataset,
               const std::filesystem::path& path);

struct DatasetStats {
  std::size_t images = 0;
  std::size_t annotations = 0;
  std::size_t interactable_annotations = 0;
  std::size_t categories = 0;
  std::size_t apps = 0;
};

DatasetStats summarize(const DatasetVariant& dataset);

AppCatalog load_app_catalog(const std::filesystem::path& path);
AppCatalog parse_app_catalog(const nlohmann::json& doc);

// Fills Scene::genres from the catalog for scenes that have none.
void attach_genres(DatasetVariant& dataset, const AppCatalog& catalog);

// semantics: identity.
// interactability: keeps interactable annotations, relabelled
//   "interactable".
// context: keeps annotations (both flags) of `context_categories`; throws
//   MissingCounterparts when none of them is non-interactable.
DatasetVariant derive_variant(
    const DatasetVariant& base, VariantKind kind,
    std::span<const std::string> context_categories = {});

// Sampling recipe for the context categories: take the `pool` most common
// categories by interactable annotation count (ties by name) and draw
// `count` of them with the seeded generator. Returned sorted.
std::vector<std::string> sample_context_categories(
    const DatasetVariant& dataset, std::uint64_t seed, std::size_t count = 41,
    std::size_t pool = 100);

}  // namespace igedet::data

#endif  // IGEDET_DATASET_H_
