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
#include <barrier>
#include <cstddef>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mhr/error.hpp"
#include "mhr/parallel.hpp"
#include "mhr/types.hpp"

namespace mhr {

// Score given to a candidate whose embedding is missing. Always ranks last.
inline constexpr double kMissingScore = -std::numeric_limits<double>::infinity();

struct ScoredEntity {
  EntityId entity;
  double score;

  friend bool operator==(const ScoredEntity&, const ScoredEntity&) = default;
};

// The total order used everywhere results are ranked: higher score first,
// ties broken by ascending entity id.
inline bool ranks_before(const ScoredEntity& a, const ScoredEntity& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  return a.entity < b.entity;
}

// Comparator adapter so any item type with a ranks_before overload works.
struct RankOrder {
  template <class Item>
  bool operator()(const Item& a, const Item& b) const {
    return ranks_before(a, b);
  }
};

// Keeps the K best items offered so far under ranks_before.
//
// Stored as a binary heap whose front is the worst retained item, so an
// offer is O(log K) and a rejected offer is a single comparison.
template <class Item>
class TopKSelector {
 public:
  explicit TopKSelector(std::size_t k) : capacity_(k) {
    if (k == 0) throw ArgumentError("top-k capacity must be at least 1");
    heap_.reserve(k);
  }

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return heap_.size(); }
  bool empty() const noexcept { return heap_.empty(); }
  bool full() const noexcept { return heap_.size() == capacity_; }

  // Worst retained item. Requires !empty().
  const Item& worst() const { return heap_.front(); }

  // Would `item` be retained if offered now?
  bool admits(const Item& item) const {
    return !full() || ranks_before(item, heap_.front());
  }

  void offer(Item item) {
    if (!full()) {
      heap_.push_back(std::move(item));
      std::push_heap(heap_.begin(), heap_.end(), RankOrder{});
    } else if (ranks_before(item, heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), RankOrder{});
      heap_.back() = std::move(item);
      std::push_heap(heap_.begin(), heap_.end(), RankOrder{});
    }
  }

  // Folds `other`'s items into this selector. Truncation to K is eager.
  void merge_from(const TopKSelector& other) {
    if (other.capacity_ != capacity_) {
      throw ArgumentError("cannot merge selectors of capacity " + std::to_string(capacity_) +
                          " and " + std::to_string(other.capacity_));
    }
    for (const auto& item : other.heap_) {
      if (admits(item)) offer(item);
    }
  }

  // Retained items in heap order (unsorted).
  std::span<const Item> items() const noexcept { return heap_; }

  // Retained items, best first. Consumes the selector.
  std::vector<Item> into_sorted_desc() && {
    std::sort_heap(heap_.begin(), heap_.end(), RankOrder{});
    return std::move(heap_);
  }

  std::vector<Item> sorted_desc() const {
    auto copy = *this;
    return std::move(copy).into_sorted_desc();
  }

  void clear() noexcept { heap_.clear(); }

 private:
  std::size_t capacity_;
  std::vector<Item> heap_;
};

template <class Item>
TopKSelector<Item> merge(const TopKSelector<Item>& a, const TopKSelector<Item>& b) {
  TopKSelector<Item> out = a;
  out.merge_from(b);
  return out;
}

// A selector shared between workers; every offer takes the mutex.
template <class Item>
class SynchronizedSelector {
 public:
  explicit SynchronizedSelector(std::size_t k) : selector_(k) {}

  void offer(Item item) {
    std::lock_guard lock(mutex_);
    selector_.offer(std::move(item));
  }

  void merge_from(const TopKSelector<Item>& other) {
    std::lock_guard lock(mutex_);
    selector_.merge_from(other);
  }

  // Only valid once all writers are done.
  TopKSelector<Item>& unsynchronized() noexcept { return selector_; }

 private:
  std::mutex mutex_;
  TopKSelector<Item> selector_;
};

enum class MergeStrategy { tree, locked };

inline const char* to_string(MergeStrategy m) noexcept {
  return m == MergeStrategy::tree ? "tree" : "locked";
}

// Collective binary-tree reduction. Every one of the num_workers workers
// calls this with its own worker_id and the same barrier (sized
// num_workers). In the round with stride s, worker w merges in w + s when w
// is a multiple of 2s and w + s exists; all workers hit the barrier every
// round. Once every worker has returned, locals[0] holds the K best of the
// union.
template <class Item, class Sync>
void reduce_topk_tree(std::span<TopKSelector<Item>> locals, std::size_t num_workers,
                      std::size_t worker_id, Sync& barrier) {
  if (worker_id >= num_workers) {
    throw ArgumentError("worker id " + std::to_string(worker_id) + " out of range for " +
                        std::to_string(num_workers) + " workers");
  }
  if (locals.size() < num_workers) throw ArgumentError("fewer local selectors than workers");
  for (std::size_t stride = 1; stride < num_workers; stride *= 2) {
    // partner must be done with its scan (first round) or its merge (later)
    barrier.arrive_and_wait();
    if (worker_id % (2 * stride) == 0 && worker_id + stride < num_workers) {
      locals[worker_id].merge_from(locals[worker_id + stride]);
    }
  }
}

// Lock-based counterpart: each worker merges its local selector into one
// shared selector inside a single critical section.
template <class Item>
void locked_merge(const TopKSelector<Item>& local, SynchronizedSelector<Item>& shared) {
  shared.merge_from(local);
}

// Runs the reduction of `locals` over `team` and returns the global result.
template <class Item>
TopKSelector<Item> reduce_selectors(std::vector<TopKSelector<Item>> locals, ThreadTeam& team,
                                    MergeStrategy strategy) {
  if (locals.empty()) throw ArgumentError("nothing to reduce");
  const std::size_t n = locals.size();
  if (n > team.size()) throw ArgumentError("more selectors than team workers");
  for (const auto& s : locals) {
    if (s.capacity() != locals[0].capacity()) {
      throw ArgumentError("all selectors in a reduction must share one capacity");
    }
  }
  if (strategy == MergeStrategy::tree) {
    std::barrier sync(static_cast<std::ptrdiff_t>(n));
    team.run(n, [&](std::size_t w) {
      reduce_topk_tree(std::span<TopKSelector<Item>>(locals), n, w, sync);
    });
    return std::move(locals[0]);
  }
  SynchronizedSelector<Item> shared(locals[0].capacity());
  team.run(n, [&](std::size_t w) { locked_merge(locals[w], shared); });
  return std::move(shared.unsynchronized());
}

}  // namespace mhr
