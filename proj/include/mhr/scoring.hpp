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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "mhr/error.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/parallel.hpp"
#include "mhr/topk.hpp"
#include "mhr/types.hpp"

namespace mhr {

inline constexpr double kDefaultGamma = 1.0;

namespace detail {

inline void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("embedding length mismatch: " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace detail

// Elementwise head + relation: the point a plausible tail should sit near.
inline Embedding embedding_aggregation(std::span<const double> head,
                                       std::span<const double> relation) {
  detail::require_same_length(head.size(), relation.size());
  Embedding out(head.size());
  for (std::size_t j = 0; j < head.size(); ++j) out[j] = head[j] + relation[j];
  return out;
}

// In-place composite += relation.
inline void extend_embedding(Embedding& composite, std::span<const double> relation) {
  detail::require_same_length(composite.size(), relation.size());
  for (std::size_t j = 0; j < composite.size(); ++j) composite[j] += relation[j];
}

// Sum of |a_j - b_j|, accumulated in index order so results are
// bit-reproducible regardless of how candidates are split over workers.
inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  detail::require_same_length(a.size(), b.size());
  double total = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) total += std::abs(a[j] - b[j]);
  return total;
}

inline double transe_score(std::span<const double> composite, std::span<const double> tail,
                           double gamma = kDefaultGamma) {
  return gamma - l1_distance(composite, tail);
}

struct ScanConfig {
  std::size_t k = 50;
  double gamma = kDefaultGamma;
  MergeStrategy merge = MergeStrategy::tree;
};

// Number of candidate score evaluations performed, summed across calls.
using EvaluationCounter = std::atomic<std::uint64_t>;

namespace detail {

inline double score_or_missing(std::span<const double> composite, const KGStore& store,
                               EntityId id, double gamma) {
  const Embedding* emb = store.entity_embedding(id);
  return emb == nullptr ? kMissingScore : transe_score(composite, *emb, gamma);
}

}  // namespace detail

// Fork-join top-K scan: candidates are split into contiguous blocks over the
// team, each worker keeps a private selector, and the selectors are reduced
// inside the same region (tree or locked, per config). A candidate without an
// embedding is offered with kMissingScore. Output is best-first and does not
// depend on the team size.
inline std::vector<ScoredEntity> score_candidates_topk(std::span<const double> composite,
                                                       std::span<const EntityId> candidates,
                                                       const KGStore& store,
                                                       const ScanConfig& config, ThreadTeam& team,
                                                       EvaluationCounter* evaluations = nullptr) {
  detail::require_same_length(composite.size(), store.dim());
  const std::size_t workers = team.size();
  std::vector<TopKSelector<ScoredEntity>> locals(workers, TopKSelector<ScoredEntity>(config.k));
  std::barrier sync(static_cast<std::ptrdiff_t>(workers));
  SynchronizedSelector<ScoredEntity> shared(config.k);

  team.run(workers, [&](std::size_t w) {
    const auto block = block_range(candidates.size(), workers, w);
    auto& local = locals[w];
    for (std::size_t i = block.begin; i < block.end; ++i) {
      const EntityId id = candidates[i];
      local.offer({id, detail::score_or_missing(composite, store, id, config.gamma)});
    }
    if (evaluations != nullptr) evaluations->fetch_add(block.size(), std::memory_order_relaxed);
    if (config.merge == MergeStrategy::tree) {
      reduce_topk_tree(std::span<TopKSelector<ScoredEntity>>(locals), workers, w, sync);
    } else {
      locked_merge(local, shared);
    }
  });

  if (config.merge == MergeStrategy::tree) return std::move(locals[0]).into_sorted_desc();
  return std::move(shared.unsynchronized()).into_sorted_desc();
}

// Baseline scan: every (candidate, score) pair is appended to one shared list
// under a lock, then the whole list is sorted and truncated to K.
inline std::vector<ScoredEntity> score_candidates_locked_list(
    std::span<const double> composite, std::span<const EntityId> candidates,
    const KGStore& store, const ScanConfig& config, ThreadTeam& team,
    EvaluationCounter* evaluations = nullptr) {
  detail::require_same_length(composite.size(), store.dim());
  if (config.k == 0) throw ArgumentError("top-k capacity must be at least 1");
  const std::size_t workers = team.size();
  std::vector<ScoredEntity> list;
  std::mutex list_mutex;

  team.run(workers, [&](std::size_t w) {
    const auto block = block_range(candidates.size(), workers, w);
    for (std::size_t i = block.begin; i < block.end; ++i) {
      const EntityId id = candidates[i];
      const ScoredEntity scored{id, detail::score_or_missing(composite, store, id, config.gamma)};
      std::lock_guard lock(list_mutex);
      list.push_back(scored);
    }
    if (evaluations != nullptr) evaluations->fetch_add(block.size(), std::memory_order_relaxed);
  });

  std::sort(list.begin(), list.end(), RankOrder{});
  if (list.size() > config.k) list.resize(config.k);
  return list;
}

}  // namespace mhr
