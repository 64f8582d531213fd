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
// Shared plumbing for provider clients: retry policy, a fair concurrency
// limiter and per-scene call accounting.
#ifndef IGEDET_PROVIDER_H_
#define IGEDET_PROVIDER_H_

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>

#include <nlohmann/json_fwd.hpp>

#include "igedet/errors.h"

namespace igedet::provider {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::function<void(std::chrono::milliseconds)> sleep =
      [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
};

// Runs `f`, retrying TransportError and RateLimited with exponential backoff.
template <typename F>
auto with_retry(const RetryPolicy& policy, F&& f) -> decltype(f()) {
  auto delay = policy.initial_backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      return f();
    } catch (const TransportError&) {
      if (attempt >= policy.max_attempts) throw;
    } catch (const RateLimited&) {
      if (attempt >= policy.max_attempts) throw;
    }
    if (policy.sleep) policy.sleep(delay);
    delay = std::chrono::milliseconds(
        static_cast<std::int64_t>(static_cast<double>(delay.count()) *
                                  policy.multiplier));
  }
}

// Counting semaphore that admits waiters in arrival order.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(std::size_t limit = 4);

  class Permit {
   public:
    explicit Permit(ConcurrencyLimiter* owner) : owner_(owner) {}
    Permit(Permit&& o) noexcept : owner_(o.owner_) { o.owner_ = nullptr; }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() {
      if (owner_) owner_->release();
    }

   private:
    ConcurrencyLimiter* owner_;
  };

  Permit acquire();
  std::size_t limit() const { return limit_; }
  std::size_t peak() const;

 private:
  void release();

  std::size_t limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::uint64_t next_ticket_ = 0;
  std::uint64_t now_serving_ = 0;
  std::size_t active_ = 0;
  std::size_t peak_ = 0;
};

// Calls issued on behalf of one scene. Not shared across threads.
struct CallLedger {
  int chat_calls = 0;
  int ground_calls = 0;
  int embed_calls = 0;
  std::map<std::string, int> stage_calls;  // template id -> requests sent

  int stage(const std::string& id) const {
    auto it = stage_calls.find(id);
    return it == stage_calls.end() ? 0 : it->second;
  }
  void merge(const CallLedger& other);
  nlohmann::json to_json() const;
};

}  // namespace igedet::provider

#endif  // IGEDET_PROVIDER_H_
