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
#include "igedet/replay.h"

#include <fstream>
#include <mutex>

#include "igedet/digest.h"
#include "igedet/errors.h"

namespace igedet::provider {

using nlohmann::json;

std::string replay_digest(const json& canonical_request) {
  return sha256_hex(canonical_request.dump());
}

ReplayStore::ReplayStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ReplayStore::path_for(std::string_view endpoint,
                                            std::string_view digest) const {
  return root_ / std::string(endpoint) / std::string(digest.substr(0, 2)) /
         (std::string(digest) + ".json");
}

std::optional<json> ReplayStore::get(std::string_view endpoint,
                                     const json& request) const {
  const std::string digest = replay_digest(request);
  const auto path = path_for(endpoint, digest);
  std::shared_lock lock(mu_);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json record = json::parse(in);
    return record.at("response");
  } catch (const json::exception& e) {
    throw SchemaError("replay record " + path.string() + ": " + e.what());
  }
}

void ReplayStore::put(std::string_view endpoint, const json& request,
                      const json& response) {
  const std::string digest = replay_digest(request);
  const auto path = path_for(endpoint, digest);
  const json record = {{"endpoint", std::string(endpoint)},
                       {"digest", digest},
                       {"request", request},
                       {"response", response}};
  std::unique_lock lock(mu_);
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw MissingFile("cannot write " + tmp);
    out << record.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::size_t ReplayStore::count() const {
  std::shared_lock lock(mu_);
  if (!std::filesystem::exists(root_)) return 0;
  std::size_t n = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root_)) {
    if (e.is_regular_file() && e.path().extension() == ".json") ++n;
  }
  return n;
}

}  // namespace igedet::provider
