// Copyright 2026 The twinbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "twinbench/parallel.hpp"

#include "twinbench/error.hpp"

namespace twinbench {

FairLimiter::FairLimiter(int limit) : limit_(limit) {
  if (limit < 1) throw Error(ErrorCode::kInvalidArgument, "limiter: limit must be >= 1");
}

void FairLimiter::acquire() {
  std::unique_lock lock(mu_);
  const uint64_t ticket = next_ticket_++;
  cv_.wait(lock, [&] { return ticket == serving_ && in_flight_ < limit_; });
  ++serving_;
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
  cv_.notify_all();
}

void FairLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_all();
}

int FairLimiter::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

int FairLimiter::peak() const {
  std::lock_guard lock(mu_);
  return peak_;
}

void parallel_for(size_t n, int parallelism, const std::function<void(size_t)>& fn) {
  if (parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  const size_t workers = std::min<size_t>(static_cast<size_t>(parallelism), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace twinbench
