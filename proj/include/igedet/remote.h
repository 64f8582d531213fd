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
// HTTP backends. Chat and embedding speak the OpenAI-compatible
// /chat/completions and /embeddings APIs; grounding speaks the /ground
// protocol documented in grounding.h.
//
// Environment:
//   IGEDET_CHAT_BASE_URL    default https://api.openai.com/v1
//   IGEDET_CHAT_API_KEY     falls back to OPENAI_API_KEY
//   IGEDET_CHAT_MODEL       default gpt-4o-2024-08-06
//   IGEDET_EMBED_BASE_URL   default: the chat base URL
//   IGEDET_EMBED_API_KEY    default: the chat key
//   IGEDET_EMBED_MODEL      default text-embedding-3-large
//   IGEDET_GROUND_URL       default http://127.0.0.1:8000
#ifndef IGEDET_REMOTE_H_
#define IGEDET_REMOTE_H_

#include <chrono>
#include <memory>
#include <string>

#include "igedet/chat.h"
#include "igedet/embedding.h"
#include "igedet/grounding.h"

namespace igedet::provider {

struct RemoteEndpoint {
  std::string base_url;
  std::string api_key;
  std::string model;
  std::chrono::seconds timeout{120};
};

RemoteEndpoint chat_endpoint_from_env();
RemoteEndpoint embed_endpoint_from_env();
RemoteEndpoint ground_endpoint_from_env();

std::shared_ptr<ChatBackend> make_remote_chat_backend(RemoteEndpoint ep);
std::shared_ptr<EmbeddingBackend> make_remote_embedding_backend(
    RemoteEndpoint ep);
std::shared_ptr<GroundingBackend> make_http_grounding_backend(
    RemoteEndpoint ep);

// "https://host:8443/v1" -> {"https://host:8443", "/v1"}
std::pair<std::string, std::string> split_base_url(const std::string& url);

}  // namespace igedet::provider

#endif  // IGEDET_REMOTE_H_
