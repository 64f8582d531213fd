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
// Content-addressed record/replay store.
//
// Layout: <root>/<endpoint>/<digest[0:2]>/<digest>.json, each file holding
// {"endpoint", "digest", "request", "response"}. The digest is the SHA-256
// of the canonical request serialized with sorted keys and no whitespace.
#ifndef IGEDET_REPLAY_H_
#define IGEDET_REPLAY_H_

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace igedet::provider {

std::string replay_digest(const nlohmann::json& canonical_request);

class ReplayStore {
 public:
  explicit ReplayStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_for(std::string_view endpoint,
                                 std::string_view digest) const;

  std::optional<nlohmann::json> get(std::string_view endpoint,
                                    const nlohmann::json& request) const;
  void put(std::string_view endpoint, const nlohmann::json& request,
           const nlohmann::json& response);

  std::size_t count() const;

 private:
  std::filesystem::path root_;
  mutable std::shared_mutex mu_;
};

}  // namespace igedet::provider

#endif  // IGEDET_REPLAY_H_
