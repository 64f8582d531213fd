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
// Train/val/test partitioning at a 6:1:3 image ratio.
//
//  app      Whole apps go to one fold. Apps are visited in seeded random
//           order and each goes to the fold whose image-count deviation
//           from target it reduces most.
//  genre    Apps are stratified by their rarest genre; strata are visited
//           most frequent first, and each app goes to the fold that best
//           reduces the combined deviation from the stratum's own 6:1:3
//           target and the global one.
//  context  Every scene containing a sampled category goes to test; the
//           remaining scenes are shuffled and cut 6:1 into train/val.
//
// Manifests list scene ids sorted within each fold.
#ifndef IGEDET_SPLIT_H_
#define IGEDET_SPLIT_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "igedet/dataset.h"

namespace igedet::data {

enum class SplitKind { kApp, kGenre, kContextSensitive };

std::string_view to_string(SplitKind kind);
SplitKind parse_split_kind(std::string_view name);

struct Split {
  SplitKind kind = SplitKind::kApp;
  std::uint64_t seed = 0;
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;

  // "train", "val" or "test".
  const std::vector<std::string>& fold(std::string_view name) const;

  bool operator==(const Split&) const = default;
};

inline constexpr double kTrainShare = 0.6;
inline constexpr double kValShare = 0.1;
inline constexpr double kTestShare = 0.3;

// Throws EmptyFold when a fold would be empty at the grouping granularity,
// UsageError when the context split has no category list.
Split make_split(const DatasetVariant& dataset, SplitKind kind,
                 std::uint64_t seed,
                 std::span<const std::string> context_categories = {});

nlohmann::json to_json(const Split& split);
Split split_from_json(const nlohmann::json& doc);

void save_split(const Split& split, const std::filesystem::path& path);
Split load_split(const std::filesystem::path& path);

}  // namespace igedet::data

#endif  // IGEDET_SPLIT_H_
