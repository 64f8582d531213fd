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
#include "igedet/grounding.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "igedet/digest.h"
#include "igedet/errors.h"

namespace igedet::provider {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double number(const json& box, const char* key, const std::string& where) {
  auto it = box.find(key);
  if (it == box.end() || !it->is_number()) {
    throw ProtocolError(where + "." + key + ": expected number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ProtocolError(where + "." + key + ": not finite");
  return v;
}

json box_json(const geo::ScoredBox& b) {
  return {{"x", b.box.x}, {"y", b.box.y}, {"w", b.box.w}, {"h", b.box.h},
          {"score", b.score}};
}

}  // namespace

json ground_request_wire(const GroundRequest& req) {
  return {{"image_b64", req.image.bytes ? base64_encode(*req.image.bytes) : ""},
          {"descriptions", req.descriptions}};
}

json ground_response_wire(const GroundResponse& resp) {
  json results = json::array();
  for (const auto& boxes : resp.results) {
    json arr = json::array();
    for (const auto& b : boxes) arr.push_back(box_json(b));
    results.push_back({{"boxes", arr}});
  }
  return {{"results", results}};
}

GroundResponse parse_ground_response(const json& body, std::size_t expected) {
  if (!body.is_object()) throw ProtocolError("response is not an object");
  auto results = body.find("results");
  if (results == body.end() || !results->is_array()) {
    throw ProtocolError("response.results: expected array");
  }
  if (results->size() != expected) {
    throw ProtocolError("response.results has " +
                        std::to_string(results->size()) + " entries for " +
                        std::to_string(expected) + " descriptions");
  }
  GroundResponse out;
  for (std::size_t i = 0; i < results->size(); ++i) {
    const std::string where = "results[" + std::to_string(i) + "]";
    const json& r = (*results)[i];
    if (!r.is_object() || !r.contains("boxes") || !r.at("boxes").is_array()) {
      throw ProtocolError(where + ".boxes: expected array");
    }
    std::vector<geo::ScoredBox> boxes;
    const json& arr = r.at("boxes");
    for (std::size_t j = 0; j < arr.size(); ++j) {
      const std::string w = where + ".boxes[" + std::to_string(j) + "]";
      if (!arr[j].is_object()) throw ProtocolError(w + ": expected object");
      geo::ScoredBox b{{number(arr[j], "x", w), number(arr[j], "y", w),
                        number(arr[j], "w", w), number(arr[j], "h", w)},
                       number(arr[j], "score", w)};
      if (b.score < 0.0 || b.score > 1.0) {
        throw ProtocolError(w + ".score outside [0, 1]");
      }
      boxes.push_back(b);
    }
    out.results.push_back(std::move(boxes));
  }
  return out;
}

json ground_canonical(const GroundRequest& req) {
  return {{"endpoint", "ground"},
          {"image", req.image.digest},
          {"descriptions", req.descriptions}};
}

std::shared_ptr<SyntheticGroundingBackend> SyntheticGroundingBackend::from_json(
    const json& doc) {
  std::vector<Rule> rules;
  try {
    for (const auto& r : doc.at("rules")) {
      Rule rule;
      rule.substring = r.at("match").get<std::string>();
      rule.image = r.value("image", std::string());
      for (const auto& b : r.at("boxes")) {
        rule.boxes.push_back({{b.at("x").get<double>(), b.at("y").get<double>(),
                               b.at("w").get<double>(), b.at("h").get<double>()},
                              b.at("score").get<double>()});
      }
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("grounding rules: ") + e.what());
  }
  return std::make_shared<SyntheticGroundingBackend>(std::move(rules));
}

std::shared_ptr<SyntheticGroundingBackend> SyntheticGroundingBackend::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

GroundResponse SyntheticGroundingBackend::ground(const GroundRequest& req) {
  const std::string image_name =
      std::filesystem::path(req.image.uri).filename().string();
  GroundResponse out;
  for (const auto& d : req.descriptions) {
    const std::string text = lower(d);
    std::vector<geo::ScoredBox> boxes;
    for (const auto& r : rules_) {
      if (!r.image.empty() && r.image != image_name) continue;
      if (text.find(lower(r.substring)) == std::string::npos) continue;
      boxes = r.boxes;
      break;
    }
    out.results.push_back(std::move(boxes));
  }
  return out;
}

GroundResponse ReplayGroundingBackend::ground(const GroundRequest& req) {
  const json key = ground_canonical(req);
  auto hit = store_->get("ground", key);
  if (!hit) {
    throw ReplayMiss("ground request " + replay_digest(key) + " not in " +
                     store_->root().string());
  }
  return parse_ground_response(*hit, req.descriptions.size());
}

GroundResponse RecordingGroundingBackend::ground(const GroundRequest& req) {
  GroundResponse resp = inner_->ground(req);
  store_->put("ground", ground_canonical(req), ground_response_wire(resp));
  return resp;
}

GroundingClient::GroundingClient(std::shared_ptr<GroundingBackend> backend,
                                 std::size_t concurrency, RetryPolicy retry)
    : backend_(std::move(backend)),
      limiter_(concurrency),
      retry_(std::move(retry)) {}

GroundResponse GroundingClient::ground(const GroundRequest& req,
                                       CallLedger* ledger) {
  if (ledger) ++ledger->ground_calls;
  GroundResponse raw = with_retry(retry_, [&] {
    auto permit = limiter_.acquire();
    return backend_->ground(req);
  });
  if (raw.results.size() != req.descriptions.size()) {
    throw ProtocolError("grounding returned " +
                        std::to_string(raw.results.size()) + " results for " +
                        std::to_string(req.descriptions.size()) +
                        " descriptions");
  }
  GroundResponse out;
  for (const auto& boxes : raw.results) {
    std::vector<geo::ScoredBox> kept;
    for (const auto& b : boxes) {
      if (b.score < 0.0 || b.score > 1.0 || !std::isfinite(b.score)) {
        throw ProtocolError("grounding score outside [0, 1]");
      }
      if (req.image.width <= 0 || req.image.height <= 0) {
        if (b.box.valid()) kept.push_back(b);
        continue;
      }
      if (auto c = geo::clamp_to(b.box, req.image.width, req.image.height)) {
        kept.push_back({*c, b.score});
      }
    }
    out.results.push_back(std::move(kept));
  }
  return out;
}

}  // namespace igedet::provider
