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
// HTTP backends against an in-process server on a loopback port.
#include <atomic>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "igedet/digest.h"
#include "igedet/errors.h"
#include "igedet/remote.h"
#include "test_util.h"

namespace igedet::provider {
namespace {

using nlohmann::json;

class LocalServer {
 public:
  LocalServer() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~LocalServer() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  RemoteEndpoint endpoint(const std::string& prefix = "") const {
    RemoteEndpoint ep;
    ep.base_url = "http://127.0.0.1:" + std::to_string(port_) + prefix;
    ep.api_key = "test-key";
    ep.model = "test-model";
    ep.timeout = std::chrono::seconds(5);
    return ep;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

RetryPolicy no_retry() {
  RetryPolicy p;
  p.max_attempts = 1;
  return p;
}

GroundRequest donut_request(std::vector<std::string> descriptions) {
  return {load_image(testutil::fixture("scenes/donut.png")),
          std::move(descriptions)};
}

TEST(GroundWireTest, RequestAndResponseFollowProtocol) {
  LocalServer srv;
  json seen;
  srv.server().Post("/ground", [&](const httplib::Request& req,
                                   httplib::Response& res) {
    seen = json::parse(req.body);
    json results = json::array();
    for (const auto& d : seen.at("descriptions")) {
      json boxes = json::array();
      if (d.get<std::string>().find("donut") != std::string::npos) {
        boxes.push_back({{"x", 100}, {"y", 80}, {"w", 50}, {"h", 50},
                         {"score", 0.9}});
      }
      results.push_back({{"boxes", boxes}});
    }
    res.set_content(json({{"results", results}}).dump(), "application/json");
  });

  GroundingClient client(make_http_grounding_backend(srv.endpoint()));
  const auto req = donut_request({"plate", "donut with colored granules"});
  const auto resp = client.ground(req);

  ASSERT_EQ(seen.size(), 2u);
  EXPECT_EQ(seen.at("descriptions"),
            json::array({"plate", "donut with colored granules"}));
  EXPECT_EQ(base64_decode(seen.at("image_b64").get<std::string>()),
            *req.image.bytes);

  ASSERT_EQ(resp.results.size(), 2u);
  EXPECT_TRUE(resp.results[0].empty());
  ASSERT_EQ(resp.results[1].size(), 1u);
  EXPECT_EQ(resp.results[1][0], (geo::ScoredBox{{100, 80, 50, 50}, 0.9}));
}

TEST(GroundWireTest, ServerErrorIsTransportErrorAndRetried) {
  LocalServer srv;
  std::atomic<int> hits{0};
  srv.server().Post("/ground", [&](const httplib::Request&,
                                   httplib::Response& res) {
    ++hits;
    res.status = 500;
    res.set_content(R"({"error": "model exploded"})", "application/json");
  });
  RetryPolicy quick;
  quick.sleep = nullptr;
  GroundingClient client(make_http_grounding_backend(srv.endpoint()), 4, quick);
  try {
    client.ground(donut_request({"donut"}));
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_NE(std::string(e.what()).find("model exploded"), std::string::npos);
  }
  EXPECT_EQ(hits.load(), 3);
}

TEST(GroundWireTest, ClientErrorIsProtocolError) {
  LocalServer srv;
  srv.server().Post("/ground", [](const httplib::Request&,
                                  httplib::Response& res) {
    res.status = 400;
    res.set_content(R"({"error": "descriptions missing"})", "application/json");
  });
  GroundingClient client(make_http_grounding_backend(srv.endpoint()), 4,
                         no_retry());
  EXPECT_THROW(client.ground(donut_request({"donut"})), ProtocolError);
}

TEST(GroundWireTest, MisalignedOrMalformedReplyIsProtocolError) {
  LocalServer srv;
  std::string body;
  srv.server().Post("/ground", [&](const httplib::Request&,
                                   httplib::Response& res) {
    res.set_content(body, "application/json");
  });
  GroundingClient client(make_http_grounding_backend(srv.endpoint()), 4,
                         no_retry());
  body = R"({"results": [{"boxes": []}]})";
  EXPECT_THROW(client.ground(donut_request({"a", "b"})), ProtocolError);
  body = "not json";
  EXPECT_THROW(client.ground(donut_request({"a"})), ProtocolError);
  body = R"({"results": [{"boxes": [{"x":0,"y":0,"w":5,"h":5,"score":-0.1}]}]})";
  EXPECT_THROW(client.ground(donut_request({"a"})), ProtocolError);
}

TEST(GroundWireTest, UnreachableAdapterIsTransportError) {
  RemoteEndpoint ep;
  {
    LocalServer srv;
    ep = srv.endpoint();
  }
  ep.timeout = std::chrono::seconds(1);
  GroundingClient client(make_http_grounding_backend(ep), 4, no_retry());
  EXPECT_THROW(client.ground(donut_request({"a"})), TransportError);
}

TEST(ChatWireTest, OpenAiCompatibleRequest) {
  LocalServer srv;
  json seen;
  std::string auth;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req,
                                               httplib::Response& res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(
        R"({"choices": [{"message": {"role": "assistant", "content": "hi"}}]})",
        "application/json");
  });
  auto backend = make_remote_chat_backend(srv.endpoint("/v1"));
  const auto img = load_image(testutil::fixture("scenes/donut.png"));
  RenderedChat req{"PII.5", 1, "describe", {img}, {0.0, 64, 7}};
  EXPECT_EQ(backend->complete(req), "hi");
  EXPECT_EQ(auth, "Bearer test-key");
  EXPECT_EQ(seen.at("model"), "test-model");
  EXPECT_EQ(seen.at("temperature"), 0.0);
  EXPECT_EQ(seen.at("seed"), 7);
  const auto& content = seen.at("messages").at(0).at("content");
  EXPECT_EQ(content.at(0).at("text"), "describe");
  const std::string url = content.at(1).at("image_url").at("url");
  ASSERT_EQ(url.rfind("data:image/png;base64,", 0), 0u);
  EXPECT_EQ(base64_decode(url.substr(22)), *img.bytes);
}

TEST(ChatWireTest, RateLimitIsDistinguished) {
  LocalServer srv;
  srv.server().Post("/chat/completions", [](const httplib::Request&,
                                            httplib::Response& res) {
    res.status = 429;
    res.set_content(R"({"error": {"message": "slow down"}})", "application/json");
  });
  auto backend = make_remote_chat_backend(srv.endpoint());
  EXPECT_THROW(backend->complete({"PI.1", 1, "x", {}, {}}), RateLimited);
}

TEST(EmbedWireTest, ParsesEmbeddingResponse) {
  LocalServer srv;
  srv.server().Post("/embeddings", [](const httplib::Request& req,
                                      httplib::Response& res) {
    const auto in = json::parse(req.body);
    EXPECT_EQ(in.at("input"), "tree");
    res.set_content(R"({"data": [{"embedding": [0.6, 0.8]}]})",
                    "application/json");
  });
  auto backend = make_remote_embedding_backend(srv.endpoint());
  const auto v = backend->embed("tree");
  EXPECT_EQ(v.values, (std::vector<double>{0.6, 0.8}));
  EXPECT_EQ(v.model_tag, "test-model");
}

TEST(RemoteConfigTest, SplitsBaseUrl) {
  EXPECT_EQ(split_base_url("https://api.example.com/v1/"),
            std::make_pair(std::string("https://api.example.com"),
                           std::string("/v1")));
  EXPECT_EQ(split_base_url("http://127.0.0.1:8000"),
            std::make_pair(std::string("http://127.0.0.1:8000"), std::string()));
}

}  // namespace
}  // namespace igedet::provider
