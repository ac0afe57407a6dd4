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
#include <cstddef>
#include <limits>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "mhr/error.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/parallel.hpp"
#include "mhr/scoring.hpp"
#include "mhr/topk.hpp"
#include "mhr/types.hpp"

namespace mhr {

// nodes.front() is the source; relations[i] labels the edge nodes[i] ->
// nodes[i + 1].
struct Path {
  std::vector<EntityId> nodes;
  std::vector<RelationId> relations;

  EntityId source() const { return nodes.front(); }
  EntityId horizon() const { return nodes.back(); }
  std::size_t hops() const noexcept { return relations.size(); }

  bool contains(EntityId id) const {
    return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
  }

  Path extended(RelationId r, EntityId next) const {
    Path p = *this;
    p.relations.push_back(r);
    p.nodes.push_back(next);
    return p;
  }

  friend bool operator==(const Path&, const Path&) = default;
  friend auto operator<=>(const Path&, const Path&) = default;
};

struct ScoredPath {
  Path path;
  double score;

  friend bool operator==(const ScoredPath&, const ScoredPath&) = default;
};

// Score descending, then nodes lexicographic, then relations lexicographic.
inline bool ranks_before(const ScoredPath& a, const ScoredPath& b) noexcept {
  if (a.score != b.score) return a.score > b.score;
  if (a.path.nodes != b.path.nodes) return a.path.nodes < b.path.nodes;
  return a.path.relations < b.path.relations;
}

// Number of partial paths the frontier arrays must hold:
// sum_{i=0}^{hops-2} k^i, i.e. (k^(hops-1) - 1) / (k - 1), and hops - 1 when
// k == 1.
inline std::size_t total_frontier_capacity(std::size_t k, std::size_t num_hops) {
  if (k == 0) throw ArgumentError("k must be at least 1");
  if (num_hops == 0) throw ArgumentError("number of hops must be at least 1");
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  std::size_t term = 1;
  for (std::size_t i = 0; i + 1 < num_hops; ++i) {
    if (total > kMax - term) throw CapacityError("frontier capacity overflows");
    total += term;
    if (i + 2 < num_hops) {
      if (term > kMax / k) throw CapacityError("frontier capacity overflows");
      term *= k;
    }
  }
  return total;
}

// emb(source) + sum of the path's relation embeddings.
inline Embedding path_composite_embedding(const Path& path, const KGStore& store) {
  if (path.nodes.empty()) throw ArgumentError("empty path");
  const Embedding* source = store.entity_embedding(path.source());
  if (source == nullptr) {
    throw QueryError("source entity " + std::to_string(to_underlying(path.source())) +
                     " has no embedding");
  }
  Embedding composite = *source;
  for (RelationId r : path.relations) extend_embedding(composite, store.relation_embedding(r));
  return composite;
}

struct FrontierEntry {
  Path path;
  Embedding composite;
};

// Next-level buffer; appends from concurrent expansions are serialised.
class Frontier {
 public:
  void reserve(std::size_t n) { entries_.reserve(n); }

  void append(std::vector<FrontierEntry> batch) {
    std::lock_guard lock(mutex_);
    for (auto& e : batch) entries_.push_back(std::move(e));
  }

  std::size_t size() const noexcept { return entries_.size(); }

  // Not synchronised; for use between levels.
  std::vector<FrontierEntry>& entries() noexcept { return entries_; }

 private:
  std::mutex mutex_;
  std::vector<FrontierEntry> entries_;
};

struct PathSearchConfig {
  std::size_t k = 50;
  double gamma = kDefaultGamma;
};

// Expands one partial path by every distinct out-edge (relation, neighbor) of its
// horizon node, in ascending (relation, tail) order. Neighbors already on the
// path, or without an embedding, are skipped. A child is scored as
// transe_score(composite + emb(relation), emb(neighbor)). Children reaching
// the target go to `results`; the best k of the rest join `next`.
inline void expand_path(const FrontierEntry& entry, Frontier& next, const KGStore& store,
                        EntityId target, const PathSearchConfig& config,
                        SynchronizedSelector<ScoredPath>& results) {
  TopKSelector<ScoredPath> beam(config.k);
  store.for_each_out_edge(entry.path.horizon(), [&](RelationId r, EntityId neighbor) {
    if (entry.path.contains(neighbor)) return;
    const Embedding* neighbor_emb = store.entity_embedding(neighbor);
    if (neighbor_emb == nullptr) return;
    Embedding composite = entry.composite;
    extend_embedding(composite, store.relation_embedding(r));
    ScoredPath child{entry.path.extended(r, neighbor),
                     transe_score(composite, *neighbor_emb, config.gamma)};
    if (neighbor == target) {
      results.offer(std::move(child));
    } else {
      beam.offer(std::move(child));
    }
  });
  if (beam.empty()) return;

  std::vector<FrontierEntry> survivors;
  survivors.reserve(beam.size());
  for (auto& child : std::move(beam).into_sorted_desc()) {
    auto composite = entry.composite;
    extend_embedding(composite, store.relation_embedding(child.path.relations.back()));
    survivors.push_back({std::move(child.path), std::move(composite)});
  }
  next.append(std::move(survivors));
}

struct PathSearchStats {
  std::vector<std::size_t> frontier_sizes;  // paths alive entering each level
};

// Level-synchronous beam search for the top-k source -> target paths of at
// most num_hops edges. Each level expands the current frontier in parallel
// over min(frontier size, team size) workers; the next level starts only
// after the whole level is done.
inline std::vector<ScoredPath> multihop_reasoning_generic(const KGStore& store, EntityId source,
                                                          EntityId target, std::size_t num_hops,
                                                          const PathSearchConfig& config,
                                                          ThreadTeam& team,
                                                          PathSearchStats* stats = nullptr) {
  const std::size_t capacity_hint = total_frontier_capacity(config.k, num_hops);
  Path start{{source}, {}};
  auto start_composite = path_composite_embedding(start, store);
  if (source == target) return {};

  SynchronizedSelector<ScoredPath> results(config.k);
  std::vector<FrontierEntry> current;
  current.push_back({std::move(start), std::move(start_composite)});

  for (std::size_t level = 0; level < num_hops && !current.empty(); ++level) {
    if (stats != nullptr) stats->frontier_sizes.push_back(current.size());
    Frontier next;
    next.reserve(std::min<std::size_t>(capacity_hint, std::size_t{1} << 16));
    const std::size_t workers = std::min(current.size(), team.size());
    team.run(workers, [&](std::size_t w) {
      const auto block = block_range(current.size(), workers, w);
      for (std::size_t i = block.begin; i < block.end; ++i) {
        expand_path(current[i], next, store, target, config, results);
      }
    });
    // Paths last-extended at the final level are never expanded.
    if (level + 1 == num_hops) break;
    current = std::move(next.entries());
    // Append order depends on scheduling; fix it so later levels are
    // deterministic in everything, not just in their results.
    std::sort(current.begin(), current.end(),
              [](const FrontierEntry& a, const FrontierEntry& b) { return a.path < b.path; });
  }
  return std::move(results.unsynchronized()).into_sorted_desc();
}

}  // namespace mhr
