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
#ifndef IGEDET_EMBEDDING_H_
#define IGEDET_EMBEDDING_H_

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "igedet/provider.h"
#include "igedet/replay.h"

namespace igedet::provider {

struct EmbeddingVector {
  std::vector<double> values;
  std::string model_tag;

  bool operator==(const EmbeddingVector&) const = default;
};

// dot(a, b) / (|a| |b|). Throws DimensionMismatch when sizes or model tags
// differ and ZeroVector when either norm is zero.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual EmbeddingVector embed(const std::string& text) = 0;
  virtual std::string model_tag() const = 0;
};

// Unit vectors seeded by a hash of the text. Distinct strings are nearly
// orthogonal in high dimension; identical strings are identical.
class HashEmbedder : public EmbeddingBackend {
 public:
  explicit HashEmbedder(std::size_t dim = 64, std::string tag = "hash-64")
      : dim_(dim), tag_(std::move(tag)) {}
  EmbeddingVector embed(const std::string& text) override;
  std::string model_tag() const override { return tag_; }

 private:
  std::size_t dim_;
  std::string tag_;
};

// Fixed label -> vector table; labels not in the table fall back to hash
// vectors of the same dimension.
class TableEmbedder : public EmbeddingBackend {
 public:
  TableEmbedder(std::string tag, std::map<std::string, std::vector<double>> table);

  // {"model_tag": str, "vectors": {label: [numbers]}}
  static std::shared_ptr<TableEmbedder> load(const std::filesystem::path& path);
  static std::shared_ptr<TableEmbedder> from_json(const nlohmann::json& doc);

  EmbeddingVector embed(const std::string& text) override;
  std::string model_tag() const override { return tag_; }

 private:
  std::string tag_;
  std::map<std::string, std::vector<double>> table_;
  HashEmbedder fallback_;
};

class ReplayEmbeddingBackend : public EmbeddingBackend {
 public:
  ReplayEmbeddingBackend(std::shared_ptr<ReplayStore> store, std::string tag)
      : store_(std::move(store)), tag_(std::move(tag)) {}
  EmbeddingVector embed(const std::string& text) override;
  std::string model_tag() const override { return tag_; }

 private:
  std::shared_ptr<ReplayStore> store_;
  std::string tag_;
};

class RecordingEmbeddingBackend : public EmbeddingBackend {
 public:
  RecordingEmbeddingBackend(std::shared_ptr<EmbeddingBackend> inner,
                            std::shared_ptr<ReplayStore> store)
      : inner_(std::move(inner)), store_(std::move(store)) {}
  EmbeddingVector embed(const std::string& text) override;
  std::string model_tag() const override { return inner_->model_tag(); }

 private:
  std::shared_ptr<EmbeddingBackend> inner_;
  std::shared_ptr<ReplayStore> store_;
};

nlohmann::json embed_canonical(const std::string& model_tag,
                               const std::string& text);

// Caching front-end; safe for concurrent use. A cached vector is never
// replaced once returned.
class EmbeddingClient {
 public:
  explicit EmbeddingClient(std::shared_ptr<EmbeddingBackend> backend,
                           std::size_t concurrency = 4, RetryPolicy retry = {});

  EmbeddingVector embed(const std::string& text);
  std::size_t backend_calls() const;
  std::string model_tag() const { return backend_->model_tag(); }

 private:
  std::shared_ptr<EmbeddingBackend> backend_;
  ConcurrencyLimiter limiter_;
  RetryPolicy retry_;
  mutable std::shared_mutex mu_;
  std::map<std::string, EmbeddingVector> cache_;
  std::size_t calls_ = 0;
};

}  // namespace igedet::provider

#endif  // IGEDET_EMBEDDING_H_
