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

#include <gtest/gtest.h>

#include <random>

#include "mhr/mhr.hpp"
#include "test_support.hpp"

using namespace mhr;

namespace {

ScoredEntity se(std::uint64_t id, double score) { return {EntityId{id}, score}; }

}  // namespace

TEST(OracleTopK, TieRule) {
  EXPECT_EQ(oracle::oracle_topk({se(1, 5), se(2, 9), se(3, 9)}, 2),
            (std::vector<ScoredEntity>{se(2, 9), se(3, 9)}));
}

TEST(OracleTopK, EmptyAndShort) {
  EXPECT_TRUE(oracle::oracle_topk(std::vector<ScoredEntity>{}, 4).empty());
  EXPECT_EQ(oracle::oracle_topk({se(1, 1), se(2, 3)}, 10),
            (std::vector<ScoredEntity>{se(2, 3), se(1, 1)}));
}

TEST(OracleThreeHop, FiveEntityKOne) {
  // dim 1; rel0 = 1, rel1 = 0, rel2 = 0.5
  test::StoreBuilder b(1, 3);
  b.relation(0, {1.0}).relation(2, {0.5});
  b.entity(0, {0}).entity(1, {0}).entity(2, {0.75}).entity(3, {0.25}).entity(4, {1.25});
  b.edge(0, 0, 2).edge(0, 0, 3).edge(2, 2, 4).edge(3, 2, 4);
  const auto store = b.build();
  ThreeHopQuery q;
  q.k = 1;
  const auto r = oracle::oracle_three_hop(store, q);
  EXPECT_EQ(r.ranked_persons, (std::vector<ScoredEntity>{se(2, 0.25)}));
  ASSERT_EQ(r.affiliations.size(), 1u);
  EXPECT_EQ(r.affiliations.at(EntityId{2}), (std::vector<ScoredEntity>{se(4, 1.0)}));
  ThreadTeam team(2);
  EXPECT_EQ(three_hop_query(store, q, PipelineMode::optimized, team), r);
}

TEST(OracleThreeHop, Seed42MatchesEngine) {
  const auto kg = generate({});
  ThreadTeam team(3);
  const auto store = build_store(kg, team);
  const auto q = kg.default_query();
  StageTimings timings;
  const auto reference = oracle::oracle_three_hop(store, q, &timings);
  EXPECT_EQ(three_hop_query(store, q, PipelineMode::optimized, team), reference);
  EXPECT_GE(timings.total_ms, timings.affiliation_ms);
}

TEST(OracleFold, LeftFold) {
  std::vector<TopKSelector<ScoredEntity>> locals(3, TopKSelector<ScoredEntity>(2));
  locals[0].offer(se(1, 5));
  locals[1].offer(se(2, 3));
  locals[2].offer(se(3, 9));
  EXPECT_EQ(oracle::oracle_fold_merge<ScoredEntity>(locals).sorted_desc(),
            (std::vector<ScoredEntity>{se(3, 9), se(1, 5)}));
}

TEST(OraclePaths, ChainAndEngineAgreement) {
  test::StoreBuilder chain(1, 1);
  for (std::uint64_t n = 0; n < 4; ++n) chain.entity(n, {0});
  chain.edge(0, 0, 1).edge(1, 0, 2).edge(2, 0, 3);
  const auto cs = chain.build();
  const auto one = oracle::oracle_beam_paths(cs, EntityId{0}, EntityId{3}, 3, 2);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].path.nodes.size(), 4u);

  std::mt19937_64 rng(50);
  ThreadTeam team(4);
  for (int c = 0; c < 10; ++c) {
    const auto store = test::random_graph(rng(), 50, 2, 200, 3).build();
    const auto s = EntityId{rng() % 50}, t = EntityId{rng() % 50};
    EXPECT_EQ(oracle::oracle_beam_paths(store, s, t, 3, 2),
              multihop_reasoning_generic(store, s, t, 3, {2}, team));
  }
}

TEST(OraclePaths, NoTruncationEqualsExhaustive) {
  std::mt19937_64 rng(60);
  for (int c = 0; c < 10; ++c) {
    const auto store = test::random_graph(rng(), 20, 2, 50, 2).build();
    const auto s = EntityId{rng() % 20}, t = EntityId{rng() % 20};
    EXPECT_EQ(oracle::oracle_beam_paths(store, s, t, 3, 5000),
              oracle::oracle_exhaustive_paths(store, s, t, 3, 5000));
  }
}
