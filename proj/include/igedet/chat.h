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
#ifndef IGEDET_CHAT_H_
#define IGEDET_CHAT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "igedet/image.h"
#include "igedet/prompts.h"
#include "igedet/provider.h"
#include "igedet/replay.h"

namespace igedet::provider {

inline constexpr std::string_view kJsonOnlySuffix =
    "\n\nReturn valid JSON only.";

struct DecodeOptions {
  double temperature = 0.0;
  int max_tokens = 1024;
  std::optional<std::uint64_t> seed;
};

struct ChatRequest {
  std::string template_id;
  std::map<std::string, std::string> slots;
  std::vector<ImagePayload> images;
  std::vector<std::string> demos;
  DecodeOptions decode;
};

// A request after template rendering; the unit every backend sees.
struct RenderedChat {
  std::string template_id;
  int template_version = 1;
  std::string prompt;
  std::vector<ImagePayload> images;
  DecodeOptions decode;

  // Replay identity: images enter by digest only.
  nlohmann::json canonical() const;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(const RenderedChat& req) = 0;
};

// Canned responses selected by template id and prompt substrings. A rule
// with several responses hands them out in order and then repeats the last.
class ScriptedChatBackend : public ChatBackend {
 public:
  struct Rule {
    std::string template_id;
    std::vector<std::string> contains;
    std::vector<std::string> responses;
  };

  ScriptedChatBackend() = default;
  explicit ScriptedChatBackend(std::vector<Rule> rules);

  // {"rules": [{"template", "contains"?, "response" | "responses"}]}.
  // Object-valued responses are serialized to JSON text.
  static std::shared_ptr<ScriptedChatBackend> load(
      const std::filesystem::path& path);
  static std::shared_ptr<ScriptedChatBackend> from_json(
      const nlohmann::json& doc);

  void add(Rule rule);
  std::string complete(const RenderedChat& req) override;

 private:
  std::mutex mu_;
  std::vector<Rule> rules_;
  std::vector<std::size_t> served_;
};

class ReplayChatBackend : public ChatBackend {
 public:
  explicit ReplayChatBackend(std::shared_ptr<ReplayStore> store)
      : store_(std::move(store)) {}
  std::string complete(const RenderedChat& req) override;

 private:
  std::shared_ptr<ReplayStore> store_;
};

class RecordingChatBackend : public ChatBackend {
 public:
  RecordingChatBackend(std::shared_ptr<ChatBackend> inner,
                       std::shared_ptr<ReplayStore> store)
      : inner_(std::move(inner)), store_(std::move(store)) {}
  std::string complete(const RenderedChat& req) override;

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::shared_ptr<ReplayStore> store_;
};

class ChatClient {
 public:
  ChatClient(std::shared_ptr<const PromptRegistry> registry,
             std::shared_ptr<ChatBackend> backend,
             std::size_t concurrency = 4, RetryPolicy retry = {});

  // Routes one template to a different backend.
  void set_override(const std::string& template_id,
                    std::shared_ptr<ChatBackend> backend);

  const PromptRegistry& registry() const { return *registry_; }

  RenderedChat render(const ChatRequest& req) const;

  // One request, with transport retries.
  std::string chat(const ChatRequest& req, CallLedger* ledger = nullptr);

  // Parses against the template's schema, re-asking up to `reasks` times
  // with kJsonOnlySuffix appended. Throws the last ParseError afterwards.
  nlohmann::json chat_structured(const ChatRequest& req,
                                 CallLedger* ledger = nullptr,
                                 int reasks = 2);

 private:
  std::string send(const RenderedChat& r, CallLedger* ledger);
  ChatBackend& backend_for(const std::string& template_id) const;

  std::shared_ptr<const PromptRegistry> registry_;
  std::shared_ptr<ChatBackend> backend_;
  std::map<std::string, std::shared_ptr<ChatBackend>> overrides_;
  ConcurrencyLimiter limiter_;
  RetryPolicy retry_;
};

}  // namespace igedet::provider

#endif  // IGEDET_CHAT_H_
