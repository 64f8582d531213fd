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
#include "igedet/remote.h"

#include <cstdlib>

#include <httplib.h>

#include "igedet/digest.h"
#include "igedet/errors.h"

namespace igedet::provider {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : fallback;
}

std::string error_text(const httplib::Result& res) {
  auto body = json::parse(res->body, nullptr, false);
  if (body.is_object() && body.contains("error")) {
    const auto& e = body.at("error");
    if (e.is_string()) return e.get<std::string>();
    if (e.is_object() && e.contains("message")) return e.at("message").dump();
    return e.dump();
  }
  return res->body.substr(0, 200);
}

// POSTs JSON and returns the parsed 200 body.
json post_json(const RemoteEndpoint& ep, const std::string& path,
               const json& payload) {
  const auto [origin, prefix] = split_base_url(ep.base_url);
  httplib::Client cli(origin);
  cli.set_connection_timeout(ep.timeout);
  cli.set_read_timeout(ep.timeout);
  cli.set_write_timeout(ep.timeout);
  httplib::Headers headers;
  if (!ep.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + ep.api_key);
  }
  const std::string url = prefix + path;
  auto res = cli.Post(url, headers, payload.dump(), "application/json");
  if (!res) {
    throw TransportError("POST " + ep.base_url + path + ": " +
                         httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    throw RateLimited("POST " + url + ": " + error_text(res));
  }
  if (res->status >= 500) {
    throw TransportError("POST " + url + " returned " +
                         std::to_string(res->status) + ": " + error_text(res));
  }
  if (res->status != 200) {
    throw ProtocolError("POST " + url + " returned " +
                        std::to_string(res->status) + ": " + error_text(res));
  }
  auto body = json::parse(res->body, nullptr, false);
  if (body.is_discarded()) {
    throw ProtocolError("POST " + url + ": response is not JSON");
  }
  return body;
}

class RemoteChatBackend : public ChatBackend {
 public:
  explicit RemoteChatBackend(RemoteEndpoint ep) : ep_(std::move(ep)) {}

  std::string complete(const RenderedChat& req) override {
    json content = json::array();
    content.push_back({{"type", "text"}, {"text", req.prompt}});
    for (const auto& img : req.images) {
      const std::string data = img.bytes ? base64_encode(*img.bytes) : "";
      content.push_back(
          {{"type", "image_url"},
           {"image_url",
            {{"url", "data:" + img.media_type + ";base64," + data}}}});
    }
    json payload = {
        {"model", ep_.model},
        {"temperature", req.decode.temperature},
        {"max_tokens", req.decode.max_tokens},
        {"messages", json::array({{{"role", "user"}, {"content", content}}})}};
    if (req.decode.seed) payload["seed"] = *req.decode.seed;
    const json body = post_json(ep_, "/chat/completions", payload);
    try {
      const json& msg = body.at("choices").at(0).at("message").at("content");
      if (msg.is_string()) return msg.get<std::string>();
      // Some servers return content parts.
      std::string out;
      for (const auto& part : msg) out += part.value("text", "");
      return out;
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("chat completion: ") + e.what());
    }
  }

 private:
  RemoteEndpoint ep_;
};

class RemoteEmbeddingBackend : public EmbeddingBackend {
 public:
  explicit RemoteEmbeddingBackend(RemoteEndpoint ep) : ep_(std::move(ep)) {}

  EmbeddingVector embed(const std::string& text) override {
    const json body =
        post_json(ep_, "/embeddings", {{"model", ep_.model}, {"input", text}});
    try {
      return {body.at("data").at(0).at("embedding").get<std::vector<double>>(),
              ep_.model};
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("embedding: ") + e.what());
    }
  }
  std::string model_tag() const override { return ep_.model; }

 private:
  RemoteEndpoint ep_;
};

class HttpGroundingBackend : public GroundingBackend {
 public:
  explicit HttpGroundingBackend(RemoteEndpoint ep) : ep_(std::move(ep)) {}

  GroundResponse ground(const GroundRequest& req) override {
    const json body = post_json(ep_, "/ground", ground_request_wire(req));
    return parse_ground_response(body, req.descriptions.size());
  }

 private:
  RemoteEndpoint ep_;
};

}  // namespace

std::pair<std::string, std::string> split_base_url(const std::string& url) {
  const auto scheme = url.find("://");
  const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

RemoteEndpoint chat_endpoint_from_env() {
  RemoteEndpoint ep;
  ep.base_url = env_or("IGEDET_CHAT_BASE_URL", "https://api.openai.com/v1");
  ep.api_key = env_or("IGEDET_CHAT_API_KEY", env_or("OPENAI_API_KEY", ""));
  ep.model = env_or("IGEDET_CHAT_MODEL", "gpt-4o-2024-08-06");
  return ep;
}

RemoteEndpoint embed_endpoint_from_env() {
  const RemoteEndpoint chat = chat_endpoint_from_env();
  RemoteEndpoint ep;
  ep.base_url = env_or("IGEDET_EMBED_BASE_URL", chat.base_url);
  ep.api_key = env_or("IGEDET_EMBED_API_KEY", chat.api_key);
  ep.model = env_or("IGEDET_EMBED_MODEL", "text-embedding-3-large");
  return ep;
}

RemoteEndpoint ground_endpoint_from_env() {
  RemoteEndpoint ep;
  ep.base_url = env_or("IGEDET_GROUND_URL", "http://127.0.0.1:8000");
  ep.model = "ground";
  return ep;
}

std::shared_ptr<ChatBackend> make_remote_chat_backend(RemoteEndpoint ep) {
  return std::make_shared<RemoteChatBackend>(std::move(ep));
}

std::shared_ptr<EmbeddingBackend> make_remote_embedding_backend(
    RemoteEndpoint ep) {
  return std::make_shared<RemoteEmbeddingBackend>(std::move(ep));
}

std::shared_ptr<GroundingBackend> make_http_grounding_backend(
    RemoteEndpoint ep) {
  return std::make_shared<HttpGroundingBackend>(std::move(ep));
}

}  // namespace igedet::provider
