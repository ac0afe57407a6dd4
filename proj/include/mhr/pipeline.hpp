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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mhr/error.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/parallel.hpp"
#include "mhr/scoring.hpp"
#include "mhr/topk.hpp"
#include "mhr/types.hpp"

namespace mhr {

// "Top-K X related to anchor1 by rel1; re-ranked by their link to anchor2
// through rel2; then top-K Y each X reaches through rel3."
struct ThreeHopQuery {
  EntityId anchor1{0};
  RelationId rel1{0};
  EntityId anchor2{1};
  RelationId rel2{1};
  RelationId rel3{2};
  std::size_t k = 50;
  double gamma = kDefaultGamma;
};

struct AffiliationResult {
  std::vector<ScoredEntity> ranked_persons;
  std::map<EntityId, std::vector<ScoredEntity>> affiliations;

  friend bool operator==(const AffiliationResult&, const AffiliationResult&) = default;
};

// Same ids in the same order everywhere; scores within `tolerance`.
inline bool equivalent(const AffiliationResult& a, const AffiliationResult& b,
                       double tolerance = 1e-9) {
  auto same = [tolerance](const std::vector<ScoredEntity>& x, const std::vector<ScoredEntity>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].entity != y[i].entity) return false;
      if (x[i].score == y[i].score) continue;  // covers matching infinities
      if (!(std::abs(x[i].score - y[i].score) <= tolerance)) return false;
    }
    return true;
  };
  if (!same(a.ranked_persons, b.ranked_persons)) return false;
  if (a.affiliations.size() != b.affiliations.size()) return false;
  for (const auto& [person, list] : a.affiliations) {
    auto it = b.affiliations.find(person);
    if (it == b.affiliations.end() || !same(list, it->second)) return false;
  }
  return true;
}

enum class PipelineMode { simple, optimized };

inline const char* to_string(PipelineMode m) noexcept {
  return m == PipelineMode::simple ? "simple" : "optimized";
}

// Wall-clock milliseconds per stage.
struct StageTimings {
  double score_per_person_ms = 0.0;
  double works_in_ms = 0.0;
  double affiliation_ms = 0.0;
  double total_ms = 0.0;
};

struct QueryDiagnostics {
  std::vector<ScoredEntity> hop1_persons;  // before hop-2 re-ranking
  std::uint64_t affiliation_evaluations = 0;
  StageTimings timings;
};

namespace detail {

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline const Embedding& require_anchor(const KGStore& store, EntityId anchor) {
  const Embedding* emb = store.entity_embedding(anchor);
  if (emb == nullptr) {
    throw QueryError("anchor entity " + std::to_string(to_underlying(anchor)) +
                     " has no embedding");
  }
  return *emb;
}

inline void require_relation(const KGStore& store, RelationId r) {
  if (!store.has_relation(r)) {
    throw QueryError("unknown relation " + std::to_string(to_underlying(r)) + " (store has " +
                     std::to_string(store.num_relations()) + ")");
  }
}

inline std::vector<ScoredEntity> scan(std::span<const double> composite,
                                      std::span<const EntityId> candidates, const KGStore& store,
                                      const ScanConfig& config, PipelineMode mode,
                                      ThreadTeam& team, EvaluationCounter* evaluations = nullptr) {
  return mode == PipelineMode::optimized
             ? score_candidates_topk(composite, candidates, store, config, team, evaluations)
             : score_candidates_locked_list(composite, candidates, store, config, team,
                                            evaluations);
}

}  // namespace detail

inline void validate_query(const KGStore& store, const ThreeHopQuery& q) {
  if (q.k == 0) throw ArgumentError("k must be at least 1");
  detail::require_relation(store, q.rel1);
  detail::require_relation(store, q.rel2);
  detail::require_relation(store, q.rel3);
  detail::require_anchor(store, q.anchor1);
  detail::require_anchor(store, q.anchor2);
}

// Replaces each person's score with its score against anchor + rel and
// re-sorts. Earlier scores are discarded.
inline std::vector<ScoredEntity> rescore_with_relation(std::span<const ScoredEntity> persons,
                                                       EntityId anchor, RelationId rel,
                                                       const KGStore& store,
                                                       const ScanConfig& config,
                                                       ThreadTeam& team,
                                                       PipelineMode mode = PipelineMode::optimized) {
  if (persons.size() > config.k) throw ArgumentError("more persons than k");
  detail::require_relation(store, rel);
  const auto composite =
      embedding_aggregation(detail::require_anchor(store, anchor), store.relation_embedding(rel));
  std::vector<EntityId> ids;
  ids.reserve(persons.size());
  for (const auto& p : persons) ids.push_back(p.entity);
  std::sort(ids.begin(), ids.end());
  return detail::scan(composite, ids, store, config, mode, team);
}

// Three-hop query. `simple` follows the baseline (shared locked lists,
// global sort per stage), `optimized` uses private selectors plus the
// configured reduction. Both return the same result.
inline AffiliationResult three_hop_query(const KGStore& store, const ThreeHopQuery& q,
                                         PipelineMode mode, ThreadTeam& team,
                                         MergeStrategy merge = MergeStrategy::tree,
                                         QueryDiagnostics* diagnostics = nullptr) {
  validate_query(store, q);
  const detail::StopWatch total;
  const ScanConfig config{q.k, q.gamma, merge};

  const auto persons = extract_entities(store.edge_table(q.rel1), Side::tail, "person");
  const auto universities = extract_entities(store.edge_table(q.rel3), Side::tail, "university");

  // computeScorePerPerson
  const detail::StopWatch hop1_clock;
  const auto award_composite = embedding_aggregation(detail::require_anchor(store, q.anchor1),
                                                     store.relation_embedding(q.rel1));
  auto hop1 = detail::scan(award_composite, persons.ids, store, config, mode, team);
  const double hop1_ms = hop1_clock.elapsed_ms();

  // computeScoreBasedOnWorksInDL
  const detail::StopWatch hop2_clock;
  AffiliationResult result;
  result.ranked_persons = rescore_with_relation(hop1, q.anchor2, q.rel2, store, config, team, mode);
  const double hop2_ms = hop2_clock.elapsed_ms();

  // computeAffiliationScore, one parallel scan per ranked person
  const detail::StopWatch hop3_clock;
  const Embedding& affiliated_rel = store.relation_embedding(q.rel3);
  EvaluationCounter evaluations{0};
  for (const auto& person : result.ranked_persons) {
    auto& list = result.affiliations[person.entity];
    const Embedding* person_emb = store.entity_embedding(person.entity);
    if (person_emb == nullptr) continue;
    const auto composite = embedding_aggregation(*person_emb, affiliated_rel);
    list = detail::scan(composite, universities.ids, store, config, mode, team, &evaluations);
  }
  const double hop3_ms = hop3_clock.elapsed_ms();

  if (diagnostics != nullptr) {
    diagnostics->hop1_persons = std::move(hop1);
    diagnostics->affiliation_evaluations = evaluations.load();
    diagnostics->timings = {hop1_ms, hop2_ms, hop3_ms, total.elapsed_ms()};
  }
  return result;
}

}  // namespace mhr
