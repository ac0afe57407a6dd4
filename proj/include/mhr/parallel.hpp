/*
Copyright (c) 2026 The mhr Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "mhr/error.hpp"

namespace mhr {

// Half-open index range [begin, end).
struct BlockRange {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const noexcept { return end - begin; }
};

// Contiguous block partition of n items over `parts` workers. The first
// n % parts blocks get one extra item.
inline BlockRange block_range(std::size_t n, std::size_t parts, std::size_t index) {
  const std::size_t base = n / parts;
  const std::size_t extra = n % parts;
  const std::size_t begin = index * base + std::min(index, extra);
  return {begin, begin + base + (index < extra ? 1 : 0)};
}

// A fixed team of workers for fork-join regions. The calling thread acts as
// worker 0; size() - 1 helper threads are parked between regions so that
// repeated regions (one per person in the affiliation stage) do not pay
// thread start-up cost.
class ThreadTeam {
 public:
  explicit ThreadTeam(std::size_t size) : size_(size) {
    if (size == 0) throw ArgumentError("thread team size must be at least 1");
    helpers_.reserve(size - 1);
    for (std::size_t i = 1; i < size; ++i) {
      helpers_.emplace_back([this, i] { helper_loop(i); });
    }
  }

  ThreadTeam(const ThreadTeam&) = delete;
  ThreadTeam& operator=(const ThreadTeam&) = delete;

  ~ThreadTeam() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
      ++generation_;
    }
    wake_.notify_all();
    for (auto& t : helpers_) t.join();
  }

  std::size_t size() const noexcept { return size_; }

  // Runs task(worker_id) for worker_id in [0, workers) and blocks until every
  // worker returns. workers is clamped to [1, size()]. If any worker throws,
  // the first exception is rethrown here after the region completes.
  void run(std::size_t workers, const std::function<void(std::size_t)>& task) {
    workers = std::clamp<std::size_t>(workers, 1, size_);
    if (workers == 1) {
      task(0);
      return;
    }
    {
      std::lock_guard lock(mutex_);
      task_ = &task;
      active_ = workers;
      pending_ = workers - 1;
      error_ = nullptr;
      ++generation_;
    }
    wake_.notify_all();

    std::exception_ptr local_error;
    try {
      task(0);
    } catch (...) {
      local_error = std::current_exception();
    }

    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    task_ = nullptr;
    if (local_error) std::rethrow_exception(local_error);
    if (error_) std::rethrow_exception(error_);
  }

  void run(const std::function<void(std::size_t)>& task) { run(size_, task); }

 private:
  void helper_loop(std::size_t id) {
    std::size_t seen = 0;
    for (;;) {
      const std::function<void(std::size_t)>* task = nullptr;
      {
        std::unique_lock lock(mutex_);
        wake_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stopping_) return;
        if (id >= active_) continue;
        task = task_;
      }
      std::exception_ptr error;
      try {
        (*task)(id);
      } catch (...) {
        error = std::current_exception();
      }
      {
        std::lock_guard lock(mutex_);
        if (error && !error_) error_ = error;
        if (--pending_ == 0) done_.notify_one();
      }
    }
  }

  std::size_t size_;
  std::vector<std::thread> helpers_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t active_ = 0;
  std::size_t pending_ = 0;
  std::size_t generation_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

}  // namespace mhr
