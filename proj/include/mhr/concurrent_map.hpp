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
#include <atomic>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mhr/error.hpp"

namespace mhr {

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Insert-heavy hash map with two phases.
//
// Build phase: insert/upsert from any number of threads; each key hashes to
// one of a power-of-two number of stripes and only that stripe's mutex is
// taken. Build-phase find is also safe but locks the stripe.
//
// After seal(): the map is immutable. find() takes no lock, insert/upsert
// throw UsageError. seal() must be called once all inserting threads have
// finished (it is the publication barrier).
template <class Key, class Value, class Hash = std::hash<Key>>
class ConcurrentMap {
 public:
  explicit ConcurrentMap(std::size_t min_stripes = 64)
      : stripe_count_(std::bit_ceil(std::max<std::size_t>(min_stripes, 1))),
        stripes_(std::make_unique<Stripe[]>(stripe_count_)) {}

  ConcurrentMap(ConcurrentMap&& other) noexcept
      : stripe_count_(other.stripe_count_),
        stripes_(std::move(other.stripes_)),
        sealed_(other.sealed_.load(std::memory_order_acquire)) {}

  ConcurrentMap& operator=(ConcurrentMap&& other) noexcept {
    stripe_count_ = other.stripe_count_;
    stripes_ = std::move(other.stripes_);
    sealed_.store(other.sealed_.load(std::memory_order_acquire), std::memory_order_release);
    return *this;
  }

  // Returns false (and leaves the map unchanged) if the key is present.
  bool insert(const Key& key, Value value) {
    Stripe& s = stripe_for(key);
    std::lock_guard lock(s.mutex);
    check_unsealed();
    return s.map.try_emplace(key, std::move(value)).second;
  }

  // Runs update(value) under the key's stripe lock, default-constructing the
  // value first if the key is absent.
  template <class Update>
  void upsert(const Key& key, Update&& update) {
    Stripe& s = stripe_for(key);
    std::lock_guard lock(s.mutex);
    check_unsealed();
    std::forward<Update>(update)(s.map[key]);
  }

  // Optional per-value finalisation, then the immutability barrier.
  template <class Finalize>
  void seal(Finalize&& finalize) {
    for (std::size_t i = 0; i < stripe_count_; ++i) {
      std::lock_guard lock(stripes_[i].mutex);
      for (auto& [k, v] : stripes_[i].map) finalize(v);
    }
    sealed_.store(true, std::memory_order_release);
  }

  void seal() {
    seal([](Value&) {});
  }

  bool sealed() const noexcept { return sealed_.load(std::memory_order_acquire); }

  // nullptr is the absent marker.
  const Value* find(const Key& key) const {
    const Stripe& s = stripe_for(key);
    if (sealed_.load(std::memory_order_acquire)) return lookup(s, key);
    std::lock_guard lock(s.mutex);
    return lookup(s, key);
  }

  bool contains(const Key& key) const { return find(key) != nullptr; }

  std::size_t size() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < stripe_count_; ++i) {
      if (sealed()) {
        n += stripes_[i].map.size();
      } else {
        std::lock_guard lock(stripes_[i].mutex);
        n += stripes_[i].map.size();
      }
    }
    return n;
  }

  bool empty() const { return size() == 0; }

  std::size_t stripe_count() const noexcept { return stripe_count_; }

  // Visits every entry in unspecified order. Requires a sealed map.
  template <class Visit>
  void for_each(Visit&& visit) const {
    if (!sealed()) throw UsageError("for_each requires a sealed map");
    for (std::size_t i = 0; i < stripe_count_; ++i) {
      for (const auto& [k, v] : stripes_[i].map) visit(k, v);
    }
  }

  // Keys in ascending order. Requires a sealed map.
  std::vector<Key> sorted_keys() const {
    std::vector<Key> keys;
    keys.reserve(size());
    for_each([&](const Key& k, const Value&) { keys.push_back(k); });
    std::sort(keys.begin(), keys.end());
    return keys;
  }

 private:
  struct alignas(64) Stripe {
    mutable std::mutex mutex;
    std::unordered_map<Key, Value, Hash> map;
  };

  static const Value* lookup(const Stripe& s, const Key& key) {
    auto it = s.map.find(key);
    return it == s.map.end() ? nullptr : &it->second;
  }

  std::size_t stripe_index(const Key& key) const {
    // High bits of a mixed hash: the inner unordered_map buckets on the low
    // bits of the raw hash, so the two must not be correlated.
    const std::uint64_t h = detail::mix64(static_cast<std::uint64_t>(Hash{}(key)));
    return static_cast<std::size_t>(h >> 32) & (stripe_count_ - 1);
  }

  Stripe& stripe_for(const Key& key) { return stripes_[stripe_index(key)]; }
  const Stripe& stripe_for(const Key& key) const { return stripes_[stripe_index(key)]; }

  void check_unsealed() const {
    if (sealed_.load(std::memory_order_relaxed)) {
      throw UsageError("insert into a sealed map");
    }
  }

  std::size_t stripe_count_;
  std::unique_ptr<Stripe[]> stripes_;
  std::atomic<bool> sealed_{false};
};

}  // namespace mhr
