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
#include "igedet/chat.h"

#include <fstream>

#include "igedet/errors.h"
#include "igedet/structured.h"

namespace igedet::provider {

using nlohmann::json;

json RenderedChat::canonical() const {
  json images_json = json::array();
  for (const auto& img : images) images_json.push_back(img.digest);
  json dec = {{"temperature", decode.temperature},
              {"max_tokens", decode.max_tokens}};
  if (decode.seed) dec["seed"] = *decode.seed;
  return {{"endpoint", "chat"},
          {"template", template_id},
          {"template_version", template_version},
          {"prompt", prompt},
          {"images", images_json},
          {"decode", dec}};
}

ScriptedChatBackend::ScriptedChatBackend(std::vector<Rule> rules)
    : rules_(std::move(rules)), served_(rules_.size(), 0) {}

std::shared_ptr<ScriptedChatBackend> ScriptedChatBackend::from_json(
    const json& doc) {
  auto backend = std::make_shared<ScriptedChatBackend>();
  try {
    for (const auto& r : doc.at("rules")) {
      Rule rule;
      rule.template_id = r.at("template").get<std::string>();
      if (r.contains("contains")) {
        const auto& c = r.at("contains");
        if (c.is_string()) {
          rule.contains.push_back(c.get<std::string>());
        } else {
          rule.contains = c.get<std::vector<std::string>>();
        }
      }
      auto text = [](const json& v) {
        return v.is_string() ? v.get<std::string>() : v.dump();
      };
      if (r.contains("responses")) {
        for (const auto& v : r.at("responses")) rule.responses.push_back(text(v));
      } else {
        rule.responses.push_back(text(r.at("response")));
      }
      if (rule.responses.empty()) {
        throw SchemaError("mock rule for " + rule.template_id +
                          " has no responses");
      }
      backend->add(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("mock script: ") + e.what());
  }
  return backend;
}

std::shared_ptr<ScriptedChatBackend> ScriptedChatBackend::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile(path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void ScriptedChatBackend::add(Rule rule) {
  std::lock_guard lock(mu_);
  rules_.push_back(std::move(rule));
  served_.push_back(0);
}

std::string ScriptedChatBackend::complete(const RenderedChat& req) {
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    const Rule& r = rules_[i];
    if (r.template_id != req.template_id) continue;
    bool all = true;
    for (const auto& needle : r.contains) {
      if (req.prompt.find(needle) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (!all) continue;
    const std::size_t k = std::min(served_[i], r.responses.size() - 1);
    ++served_[i];
    return r.responses[k];
  }
  throw ReplayMiss("no scripted response for " + req.template_id);
}

std::string ReplayChatBackend::complete(const RenderedChat& req) {
  const json key = req.canonical();
  auto hit = store_->get(req.template_id, key);
  if (!hit) {
    throw ReplayMiss(req.template_id + " request " + replay_digest(key) +
                     " not in " + store_->root().string());
  }
  return hit->get<std::string>();
}

std::string RecordingChatBackend::complete(const RenderedChat& req) {
  std::string out = inner_->complete(req);
  store_->put(req.template_id, req.canonical(), out);
  return out;
}

ChatClient::ChatClient(std::shared_ptr<const PromptRegistry> registry,
                       std::shared_ptr<ChatBackend> backend,
                       std::size_t concurrency, RetryPolicy retry)
    : registry_(std::move(registry)),
      backend_(std::move(backend)),
      limiter_(concurrency),
      retry_(std::move(retry)) {}

void ChatClient::set_override(const std::string& template_id,
                              std::shared_ptr<ChatBackend> backend) {
  overrides_[template_id] = std::move(backend);
}

ChatBackend& ChatClient::backend_for(const std::string& template_id) const {
  auto it = overrides_.find(template_id);
  return it != overrides_.end() ? *it->second : *backend_;
}

RenderedChat ChatClient::render(const ChatRequest& req) const {
  const PromptTemplate& t = registry_->get(req.template_id);
  if (req.images.size() != t.images) {
    throw TemplateError(t.id + " expects " + std::to_string(t.images) +
                        " image(s), got " + std::to_string(req.images.size()));
  }
  RenderedChat r;
  r.template_id = t.id;
  r.template_version = t.version;
  r.prompt = t.render(req.slots, req.demos);
  r.images = req.images;
  r.decode = req.decode;
  return r;
}

std::string ChatClient::send(const RenderedChat& r, CallLedger* ledger) {
  if (ledger) {
    ++ledger->chat_calls;
    ++ledger->stage_calls[r.template_id];
  }
  ChatBackend& backend = backend_for(r.template_id);
  return with_retry(retry_, [&] {
    auto permit = limiter_.acquire();
    return backend.complete(r);
  });
}

std::string ChatClient::chat(const ChatRequest& req, CallLedger* ledger) {
  return send(render(req), ledger);
}

json ChatClient::chat_structured(const ChatRequest& req, CallLedger* ledger,
                                 int reasks) {
  RenderedChat r = render(req);
  const std::string& schema_id = registry_->get(req.template_id).schema_id;
  for (int attempt = 0;; ++attempt) {
    const std::string raw = send(r, ledger);
    try {
      return parse_structured(raw, schema_id);
    } catch (const ParseError&) {
      if (attempt >= reasks) throw;
    }
    // Each re-ask differs from the last so replay keys stay distinct.
    r.prompt += kJsonOnlySuffix;
  }
}

}  // namespace igedet::provider
