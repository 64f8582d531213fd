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
#include "igedet/split.h"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "igedet/errors.h"
#include "igedet/random.h"

namespace igedet::data {

using nlohmann::json;

namespace {

// Fold shares in tenths so that deviation bookkeeping is exact.
constexpr std::array<std::int64_t, 3> kShares = {6, 1, 3};
constexpr std::array<const char*, 3> kFoldNames = {"train", "val", "test"};

using Counts = std::array<std::int64_t, 3>;

// Change of |count - target| (both scaled by 10) when n items join fold f.
std::int64_t deviation_delta(const Counts& counts, std::int64_t total,
                             std::size_t f, std::int64_t n) {
  const std::int64_t target = total * kShares[f];
  const std::int64_t before = counts[f] * 10 - target;
  const std::int64_t after = (counts[f] + n) * 10 - target;
  return std::llabs(after) - std::llabs(before);
}

std::int64_t deficit(const Counts& counts, std::int64_t total, std::size_t f) {
  return total * kShares[f] - counts[f] * 10;
}

// Fold minimizing `cost`, ties to the larger global deficit, then to the
// earlier fold.
template <typename Cost>
std::size_t pick_fold(const Counts& global, std::int64_t global_total,
                      Cost cost) {
  std::size_t best = 0;
  for (std::size_t f = 1; f < 3; ++f) {
    const auto cf = cost(f);
    const auto cb = cost(best);
    if (cf < cb || (cf == cb && deficit(global, global_total, f) >
                                    deficit(global, global_total, best))) {
      best = f;
    }
  }
  return best;
}

using AppGroups = std::map<std::string, std::vector<std::string>>;

AppGroups group_by_app(const DatasetVariant& dataset) {
  AppGroups groups;
  for (const auto& s : dataset.scenes) groups[s.app_id].push_back(s.scene_id);
  for (auto& [app, scenes] : groups) std::sort(scenes.begin(), scenes.end());
  return groups;
}

void check_nonempty(const Split& split) {
  for (std::size_t f = 0; f < 3; ++f) {
    if (split.fold(kFoldNames[f]).empty()) {
      throw EmptyFold(std::string(kFoldNames[f]) + " fold of the " +
                      std::string(to_string(split.kind)) +
                      " split is empty; the dataset is too small for a "
                      "6:1:3 ratio at this grouping granularity");
    }
  }
}

void assign(Split& split, std::size_t fold,
            const std::vector<std::string>& scenes) {
  auto& dst = fold == 0 ? split.train : fold == 1 ? split.val : split.test;
  dst.insert(dst.end(), scenes.begin(), scenes.end());
}

Split app_split(const DatasetVariant& dataset, std::uint64_t seed) {
  const AppGroups groups = group_by_app(dataset);
  std::vector<std::string> apps;
  for (const auto& [app, _] : groups) apps.push_back(app);
  Rng rng(seed);
  rng.shuffle(apps);

  const auto total = static_cast<std::int64_t>(dataset.scenes.size());
  Counts counts{};
  Split split{SplitKind::kApp, seed, {}, {}, {}};
  for (const auto& app : apps) {
    const auto& scenes = groups.at(app);
    const auto n = static_cast<std::int64_t>(scenes.size());
    const std::size_t f = pick_fold(counts, total, [&](std::size_t g) {
      return deviation_delta(counts, total, g, n);
    });
    counts[f] += n;
    assign(split, f, scenes);
  }
  return split;
}

Split genre_split(const DatasetVariant& dataset, std::uint64_t seed) {
  const AppGroups groups = group_by_app(dataset);

  std::map<std::string, std::set<std::string>> app_genres;
  for (const auto& s : dataset.scenes) {
    app_genres[s.app_id].insert(s.genres.begin(), s.genres.end());
  }
  std::map<std::string, std::size_t> genre_freq;
  for (const auto& [app, genres] : app_genres) {
    for (const auto& g : genres) ++genre_freq[g];
  }

  // Stratum of an app: its rarest genre, "" for apps without genres.
  std::map<std::string, std::vector<std::string>> strata;
  for (const auto& [app, genres] : app_genres) {
    std::string stratum;
    std::size_t best = SIZE_MAX;
    for (const auto& g : genres) {
      if (genre_freq[g] < best) {
        best = genre_freq[g];
        stratum = g;
      }
    }
    strata[stratum].push_back(app);
  }
  std::vector<std::string> order;
  for (const auto& [name, _] : strata) order.push_back(name);
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& a, const std::string& b) {
                     return strata[a].size() > strata[b].size();
                   });

  Rng rng(seed);
  const auto total = static_cast<std::int64_t>(dataset.scenes.size());
  Counts global{};
  Split split{SplitKind::kGenre, seed, {}, {}, {}};
  for (const auto& name : order) {
    auto apps = strata[name];
    rng.shuffle(apps);
    std::int64_t stratum_total = 0;
    for (const auto& app : apps) {
      stratum_total += static_cast<std::int64_t>(groups.at(app).size());
    }
    Counts local{};
    for (const auto& app : apps) {
      const auto& scenes = groups.at(app);
      const auto n = static_cast<std::int64_t>(scenes.size());
      const std::size_t f = pick_fold(global, total, [&](std::size_t g) {
        return deviation_delta(local, stratum_total, g, n) +
               deviation_delta(global, total, g, n);
      });
      local[f] += n;
      global[f] += n;
      assign(split, f, scenes);
    }
  }
  return split;
}

Split context_split(const DatasetVariant& dataset, std::uint64_t seed,
                    std::span<const std::string> categories) {
  if (categories.empty()) {
    throw UsageError("context-sensitive split requires the sampled categories");
  }
  const std::set<std::string> wanted(categories.begin(), categories.end());
  std::set<std::string> forced;
  for (const auto& a : dataset.annotations) {
    if (wanted.contains(a.category)) forced.insert(a.scene_id);
  }

  Split split{SplitKind::kContextSensitive, seed, {}, {}, {}};
  std::vector<std::string> rest;
  for (const auto& s : dataset.scenes) {
    if (forced.contains(s.scene_id)) {
      split.test.push_back(s.scene_id);
    } else {
      rest.push_back(s.scene_id);
    }
  }
  std::sort(rest.begin(), rest.end());
  Rng rng(seed);
  rng.shuffle(rest);

  const auto n = static_cast<std::int64_t>(rest.size());
  if (n >= 2) {
    // round(6n / 7), kept inside [1, n - 1]
    const std::int64_t n_train = std::clamp<std::int64_t>(
        (12 * n + 7) / 14, 1, n - 1);
    split.train.assign(rest.begin(), rest.begin() + n_train);
    split.val.assign(rest.begin() + n_train, rest.end());
  } else {
    split.train = rest;
  }
  return split;
}

}  // namespace

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kApp:
      return "app";
    case SplitKind::kGenre:
      return "genre";
    case SplitKind::kContextSensitive:
      return "context";
  }
  return "app";
}

SplitKind parse_split_kind(std::string_view name) {
  if (name == "app") return SplitKind::kApp;
  if (name == "genre") return SplitKind::kGenre;
  if (name == "context" || name == "context_sensitive" ||
      name == "context-sensitive") {
    return SplitKind::kContextSensitive;
  }
  throw UsageError("unknown split kind '" + std::string(name) + "'");
}

const std::vector<std::string>& Split::fold(std::string_view name) const {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test") return test;
  throw UsageError("unknown fold '" + std::string(name) + "'");
}

Split make_split(const DatasetVariant& dataset, SplitKind kind,
                 std::uint64_t seed,
                 std::span<const std::string> context_categories) {
  Split split;
  switch (kind) {
    case SplitKind::kApp:
      split = app_split(dataset, seed);
      break;
    case SplitKind::kGenre:
      split = genre_split(dataset, seed);
      break;
    case SplitKind::kContextSensitive:
      split = context_split(dataset, seed, context_categories);
      break;
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  check_nonempty(split);
  return split;
}

json to_json(const Split& split) {
  return {{"kind", std::string(to_string(split.kind))},
          {"seed", split.seed},
          {"train", split.train},
          {"val", split.val},
          {"test", split.test}};
}

Split split_from_json(const json& doc) {
  try {
    Split s;
    s.kind = parse_split_kind(doc.at("kind").get<std::string>());
    s.seed = doc.at("seed").get<std::uint64_t>();
    s.train = doc.at("train").get<std::vector<std::string>>();
    s.val = doc.at("val").get<std::vector<std::string>>();
    s.test = doc.at("test").get<std::vector<std::string>>();
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("split manifest: ") + e.what());
  }
}

void save_split(const Split& split, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot write " + path.string());
  out << to_json(split).dump(2) << '\n';
}

Split load_split(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    return split_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace igedet::data
