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

// Bounded parallelism helpers shared by the gateways.

#ifndef TWINBENCH_PARALLEL_HPP_
#define TWINBENCH_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace twinbench {

// Caps the number of concurrent holders. Waiters are admitted strictly in
// arrival order.
class FairLimiter {
 public:
  explicit FairLimiter(int limit);

  void acquire();
  void release();

  int limit() const { return limit_; }
  int in_flight() const;
  // Highest in_flight() ever observed.
  int peak() const;

  class Permit {
   public:
    explicit Permit(FairLimiter& l) : l_(l) { l_.acquire(); }
    ~Permit() { l_.release(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    FairLimiter& l_;
  };

 private:
  const int limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  uint64_t next_ticket_ = 0;
  uint64_t serving_ = 0;
  int in_flight_ = 0;
  int peak_ = 0;
};

// Calls fn(i) for every i in [0, n) on up to `parallelism` threads. fn is
// expected to capture its own failures; an escaping exception is rethrown
// after all workers stop.
void parallel_for(size_t n, int parallelism, const std::function<void(size_t)>& fn);

}  // namespace twinbench

#endif  // TWINBENCH_PARALLEL_HPP_
