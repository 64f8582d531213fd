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
#include "igedet/embedding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "igedet/errors.h"
#include "igedet/random.h"

namespace igedet::provider {

using nlohmann::json;

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.model_tag != b.model_tag) {
    throw DimensionMismatch("model tags differ: '" + a.model_tag + "' vs '" +
                            b.model_tag + "'");
  }
  if (a.values.size() != b.values.size()) {
    throw DimensionMismatch(std::to_string(a.values.size()) + " vs " +
                            std::to_string(b.values.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine of a zero vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingVector HashEmbedder::embed(const std::string& text) {
  Rng rng(derive_seed(fnv1a64(text), dim_, "hash-embed"));
  EmbeddingVector v{std::vector<double>(dim_), tag_};
  double norm = 0;
  for (auto& x : v.values) {
    x = rng.uniform(-1.0, 1.0);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v.values) x /= norm;
  return v;
}

TableEmbedder::TableEmbedder(std::string tag,
                             std::map<std::string, std::vector<double>> table)
    : tag_(std::move(tag)),
      table_(std::move(table)),
      fallback_(table_.empty() ? 64 : table_.begin()->second.size(), tag_) {
  const std::size_t dim = table_.empty() ? 64 : table_.begin()->second.size();
  for (const auto& [label, vec] : table_) {
    if (vec.size() != dim) {
      throw DimensionMismatch("table vector for '" + label + "' has " +
                              std::to_string(vec.size()) + " entries");
    }
  }
}

std::shared_ptr<TableEmbedder> TableEmbedder::from_json(const json& doc) {
  try {
    return std::make_shared<TableEmbedder>(
        doc.value("model_tag", std::string("table")),
        doc.at("vectors").get<std::map<std::string, std::vector<double>>>());
  } catch (const json::exception& e) {
    throw SchemaError(std::string("embedding table: ") + e.what());
  }
}

std::shared_ptr<TableEmbedder> TableEmbedder::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

EmbeddingVector TableEmbedder::embed(const std::string& text) {
  if (auto it = table_.find(text); it != table_.end()) {
    return {it->second, tag_};
  }
  return fallback_.embed(text);
}

json embed_canonical(const std::string& model_tag, const std::string& text) {
  return {{"endpoint", "embed"}, {"model_tag", model_tag}, {"text", text}};
}

EmbeddingVector ReplayEmbeddingBackend::embed(const std::string& text) {
  const json key = embed_canonical(tag_, text);
  auto hit = store_->get("embed", key);
  if (!hit) {
    throw ReplayMiss("embedding for '" + text + "' (" + replay_digest(key) +
                     ") not in " + store_->root().string());
  }
  return {hit->get<std::vector<double>>(), tag_};
}

EmbeddingVector RecordingEmbeddingBackend::embed(const std::string& text) {
  EmbeddingVector v = inner_->embed(text);
  store_->put("embed", embed_canonical(v.model_tag, text), v.values);
  return v;
}

EmbeddingClient::EmbeddingClient(std::shared_ptr<EmbeddingBackend> backend,
                                 std::size_t concurrency, RetryPolicy retry)
    : backend_(std::move(backend)),
      limiter_(concurrency),
      retry_(std::move(retry)) {}

EmbeddingVector EmbeddingClient::embed(const std::string& text) {
  if (text.empty()) throw UsageError("cannot embed empty text");
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(text); it != cache_.end()) return it->second;
  }
  EmbeddingVector v = with_retry(retry_, [&] {
    auto permit = limiter_.acquire();
    return backend_->embed(text);
  });
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      throw ProtocolError("non-finite embedding entry for '" + text + "'");
    }
  }
  std::unique_lock lock(mu_);
  ++calls_;
  // First writer wins, so a returned vector never changes.
  return cache_.emplace(text, std::move(v)).first->second;
}

std::size_t EmbeddingClient::backend_calls() const {
  std::shared_lock lock(mu_);
  return calls_;
}

}  // namespace igedet::provider
