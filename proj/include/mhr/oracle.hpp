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

// Slow sequential references. Nothing here uses threads or bounded heaps;
// the engine is checked against these, never the other way round.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "mhr/generic.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/pipeline.hpp"
#include "mhr/topk.hpp"
#include "mhr/types.hpp"

namespace mhr::oracle {

namespace detail {

inline bool entity_order(const ScoredEntity& a, const ScoredEntity& b) {
  if (a.score != b.score) return a.score > b.score;
  return to_underlying(a.entity) < to_underlying(b.entity);
}

inline bool path_order(const ScoredPath& a, const ScoredPath& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.path.nodes != b.path.nodes) return a.path.nodes < b.path.nodes;
  return a.path.relations < b.path.relations;
}

inline Embedding add(const Embedding& a, const Embedding& b) {
  Embedding out(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + b[j];
  return out;
}

inline double score(const Embedding& composite, const Embedding& tail, double gamma) {
  double distance = 0.0;
  for (std::size_t j = 0; j < composite.size(); ++j) distance += std::fabs(composite[j] - tail[j]);
  return gamma - distance;
}

inline std::vector<ScoredEntity> rank_all(const Embedding& composite,
                                          const std::vector<EntityId>& candidates,
                                          const KGStore& store, double gamma, std::size_t k) {
  std::vector<ScoredEntity> all;
  for (EntityId id : candidates) {
    const Embedding* emb = store.entity_embedding(id);
    all.push_back({id, emb == nullptr ? -std::numeric_limits<double>::infinity()
                                      : score(composite, *emb, gamma)});
  }
  std::sort(all.begin(), all.end(), entity_order);
  if (all.size() > k) all.resize(k);
  return all;
}

// Distinct tails of a relation table, ascending, by scanning every entry.
inline std::vector<EntityId> tails_of(const EdgeTable& table) {
  std::set<EntityId> seen;
  for (const auto& [head, tails] : table.canonical()) seen.insert(tails.begin(), tails.end());
  return {seen.begin(), seen.end()};
}

}  // namespace detail

// Sort everything, keep the first k.
inline std::vector<ScoredEntity> oracle_topk(std::vector<ScoredEntity> items, std::size_t k) {
  std::sort(items.begin(), items.end(), detail::entity_order);
  if (items.size() > k) items.resize(k);
  return items;
}

inline std::vector<ScoredPath> oracle_topk(std::vector<ScoredPath> items, std::size_t k) {
  std::sort(items.begin(), items.end(), detail::path_order);
  if (items.size() > k) items.resize(k);
  return items;
}

// Left fold of selector merge over all locals.
template <class Item>
TopKSelector<Item> oracle_fold_merge(std::span<const TopKSelector<Item>> locals) {
  TopKSelector<Item> acc(locals.front().capacity());
  for (const auto& s : locals) acc = merge(acc, s);
  return acc;
}

inline AffiliationResult oracle_three_hop(const KGStore& store, const ThreeHopQuery& q,
                                          StageTimings* timings = nullptr) {
  validate_query(store, q);
  const mhr::detail::StopWatch total;
  const auto persons = detail::tails_of(store.edge_table(q.rel1));
  const auto universities = detail::tails_of(store.edge_table(q.rel3));

  const mhr::detail::StopWatch hop1_clock;
  const auto award = detail::add(*store.entity_embedding(q.anchor1),
                                 store.relation_embedding(q.rel1));
  const auto hop1 = detail::rank_all(award, persons, store, q.gamma, q.k);
  const double hop1_ms = hop1_clock.elapsed_ms();

  const mhr::detail::StopWatch hop2_clock;
  std::vector<EntityId> top;
  for (const auto& p : hop1) top.push_back(p.entity);
  const auto works_in = detail::add(*store.entity_embedding(q.anchor2),
                                    store.relation_embedding(q.rel2));
  AffiliationResult result;
  result.ranked_persons = detail::rank_all(works_in, top, store, q.gamma, q.k);
  const double hop2_ms = hop2_clock.elapsed_ms();

  const mhr::detail::StopWatch hop3_clock;
  for (const auto& p : result.ranked_persons) {
    auto& list = result.affiliations[p.entity];
    const Embedding* emb = store.entity_embedding(p.entity);
    if (emb == nullptr) continue;
    const auto composite = detail::add(*emb, store.relation_embedding(q.rel3));
    list = detail::rank_all(composite, universities, store, q.gamma, q.k);
  }
  if (timings != nullptr) {
    *timings = {hop1_ms, hop2_ms, hop3_clock.elapsed_ms(), total.elapsed_ms()};
  }
  return result;
}

namespace detail {

struct Child {
  ScoredPath scored;
  Embedding composite;
};

// All admissible one-edge extensions of `path`, in (relation, tail) order.
inline std::vector<Child> children_of(const Path& path, const Embedding& composite,
                                      const KGStore& store, double gamma) {
  std::vector<Child> out;
  for (std::size_t r = 0; r < store.num_relations(); ++r) {
    const auto rel = RelationId{static_cast<std::uint32_t>(r)};
    const auto tails = store.edge_table(rel).tails(path.nodes.back());
    for (EntityId nb : std::set<EntityId>(tails.begin(), tails.end())) {
      if (std::find(path.nodes.begin(), path.nodes.end(), nb) != path.nodes.end()) continue;
      const Embedding* emb = store.entity_embedding(nb);
      if (emb == nullptr) continue;
      auto extended = add(composite, store.relation_embedding(rel));
      Path p = path;
      p.nodes.push_back(nb);
      p.relations.push_back(rel);
      const double s = score(extended, *emb, gamma);
      out.push_back({{std::move(p), s}, std::move(extended)});
    }
  }
  return out;
}

inline void beam_dfs(const Path& path, const Embedding& composite, std::size_t depth,
                     const KGStore& store, EntityId target, std::size_t num_hops, std::size_t k,
                     double gamma, std::vector<ScoredPath>& results) {
  auto children = children_of(path, composite, store, gamma);
  std::vector<Child> continuing;
  for (auto& c : children) {
    if (c.scored.path.nodes.back() == target) {
      results.push_back(c.scored);
    } else {
      continuing.push_back(std::move(c));
    }
  }
  if (depth + 1 >= num_hops) return;
  std::sort(continuing.begin(), continuing.end(),
            [](const Child& a, const Child& b) { return path_order(a.scored, b.scored); });
  if (continuing.size() > k) continuing.resize(k);
  for (const auto& c : continuing) {
    beam_dfs(c.scored.path, c.composite, depth + 1, store, target, num_hops, k, gamma, results);
  }
}

inline void exhaustive_dfs(const Path& path, const Embedding& composite, const KGStore& store,
                           EntityId target, std::size_t num_hops, double gamma,
                           std::vector<ScoredPath>& results) {
  for (auto& c : children_of(path, composite, store, gamma)) {
    if (c.scored.path.nodes.back() == target) {
      results.push_back(c.scored);
    } else if (c.scored.path.relations.size() < num_hops) {
      exhaustive_dfs(c.scored.path, c.composite, store, target, num_hops, gamma, results);
    }
  }
}

inline Embedding source_embedding(const KGStore& store, EntityId source) {
  const Embedding* emb = store.entity_embedding(source);
  if (emb == nullptr) {
    throw QueryError("source entity " + std::to_string(to_underlying(source)) +
                     " has no embedding");
  }
  return *emb;
}

}  // namespace detail

// Depth-first replay of the per-parent beam rule: at every expanded node
// only the k best non-target children are followed.
inline std::vector<ScoredPath> oracle_beam_paths(const KGStore& store, EntityId source,
                                                 EntityId target, std::size_t num_hops,
                                                 std::size_t k, double gamma = kDefaultGamma) {
  total_frontier_capacity(k, num_hops);
  const auto composite = detail::source_embedding(store, source);
  if (source == target) return {};
  std::vector<ScoredPath> results;
  detail::beam_dfs(Path{{source}, {}}, composite, 0, store, target, num_hops, k, gamma, results);
  return oracle_topk(std::move(results), k);
}

// Every cycle-free source -> target path of at most num_hops edges that
// touches the target only at its end; best k returned.
inline std::vector<ScoredPath> oracle_exhaustive_paths(const KGStore& store, EntityId source,
                                                       EntityId target, std::size_t num_hops,
                                                       std::size_t k,
                                                       double gamma = kDefaultGamma) {
  const auto composite = detail::source_embedding(store, source);
  if (source == target) return {};
  std::vector<ScoredPath> results;
  detail::exhaustive_dfs(Path{{source}, {}}, composite, store, target, num_hops, gamma, results);
  return oracle_topk(std::move(results), k);
}

}  // namespace mhr::oracle
