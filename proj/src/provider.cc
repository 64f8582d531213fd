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
#include "igedet/provider.h"

#include <algorithm>

#include <nlohmann/json.hpp>

namespace igedet::provider {

ConcurrencyLimiter::ConcurrencyLimiter(std::size_t limit)
    : limit_(std::max<std::size_t>(limit, 1)) {}

ConcurrencyLimiter::Permit ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mu_);
  const std::uint64_t ticket = next_ticket_++;
  cv_.wait(lock, [&] { return ticket == now_serving_ && active_ < limit_; });
  ++now_serving_;
  ++active_;
  peak_ = std::max(peak_, active_);
  // The next ticket holder may also fit.
  cv_.notify_all();
  return Permit(this);
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --active_;
  }
  cv_.notify_all();
}

std::size_t ConcurrencyLimiter::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

void CallLedger::merge(const CallLedger& other) {
  chat_calls += other.chat_calls;
  ground_calls += other.ground_calls;
  embed_calls += other.embed_calls;
  for (const auto& [k, v] : other.stage_calls) stage_calls[k] += v;
}

nlohmann::json CallLedger::to_json() const {
  return {{"chat_calls", chat_calls},
          {"ground_calls", ground_calls},
          {"embed_calls", embed_calls},
          {"stage_calls", stage_calls}};
}

}  // namespace igedet::provider
