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
// Description grounding. The wire format spoken to an adapter service:
//
//   POST /ground  {"image_b64": str, "descriptions": [str]}
//   200           {"results": [{"boxes": [{"x","y","w","h","score"}]}]}
//   4xx / 5xx     {"error": str}
//
// results[i] answers descriptions[i]; boxes are absolute top-left xywh.
#ifndef IGEDET_GROUNDING_H_
#define IGEDET_GROUNDING_H_

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "igedet/geometry.h"
#include "igedet/image.h"
#include "igedet/provider.h"
#include "igedet/replay.h"

namespace igedet::provider {

struct GroundRequest {
  ImagePayload image;
  std::vector<std::string> descriptions;
};

struct GroundResponse {
  std::vector<std::vector<geo::ScoredBox>> results;
};

nlohmann::json ground_request_wire(const GroundRequest& req);
nlohmann::json ground_response_wire(const GroundResponse& resp);

// Strict decoding of a response body. Throws ProtocolError on any shape
// problem, a length mismatch or a score outside [0, 1].
GroundResponse parse_ground_response(const nlohmann::json& body,
                                     std::size_t expected);

nlohmann::json ground_canonical(const GroundRequest& req);

class GroundingBackend {
 public:
  virtual ~GroundingBackend() = default;
  virtual GroundResponse ground(const GroundRequest& req) = 0;
};

// Boxes configured per description substring (case-insensitive). A rule
// may be scoped to images whose file name equals `image`. First match wins.
class SyntheticGroundingBackend : public GroundingBackend {
 public:
  struct Rule {
    std::string substring;
    std::string image;  // empty = any image
    std::vector<geo::ScoredBox> boxes;
  };

  SyntheticGroundingBackend() = default;
  explicit SyntheticGroundingBackend(std::vector<Rule> rules)
      : rules_(std::move(rules)) {}

  // {"rules": [{"match", "image"?, "boxes": [{x,y,w,h,score}]}]}
  static std::shared_ptr<SyntheticGroundingBackend> load(
      const std::filesystem::path& path);
  static std::shared_ptr<SyntheticGroundingBackend> from_json(
      const nlohmann::json& doc);

  GroundResponse ground(const GroundRequest& req) override;

 private:
  std::vector<Rule> rules_;
};

class ReplayGroundingBackend : public GroundingBackend {
 public:
  explicit ReplayGroundingBackend(std::shared_ptr<ReplayStore> store)
      : store_(std::move(store)) {}
  GroundResponse ground(const GroundRequest& req) override;

 private:
  std::shared_ptr<ReplayStore> store_;
};

class RecordingGroundingBackend : public GroundingBackend {
 public:
  RecordingGroundingBackend(std::shared_ptr<GroundingBackend> inner,
                            std::shared_ptr<ReplayStore> store)
      : inner_(std::move(inner)), store_(std::move(store)) {}
  GroundResponse ground(const GroundRequest& req) override;

 private:
  std::shared_ptr<GroundingBackend> inner_;
  std::shared_ptr<ReplayStore> store_;
};

class GroundingClient {
 public:
  explicit GroundingClient(std::shared_ptr<GroundingBackend> backend,
                           std::size_t concurrency = 4, RetryPolicy retry = {});

  // Response aligned with the descriptions, boxes clamped to the image and
  // degenerate ones dropped.
  GroundResponse ground(const GroundRequest& req, CallLedger* ledger = nullptr);

 private:
  std::shared_ptr<GroundingBackend> backend_;
  ConcurrencyLimiter limiter_;
  RetryPolicy retry_;
};

}  // namespace igedet::provider

#endif  // IGEDET_GROUNDING_H_
