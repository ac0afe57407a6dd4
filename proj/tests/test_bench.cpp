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

#include <set>
#include <sstream>

#include "mhr/mhr.hpp"

using namespace mhr;

namespace {

bench::BenchSpec small_spec() {
  bench::BenchSpec spec;
  spec.dataset.num_entities = 2000;
  spec.dataset.num_persons = 300;
  spec.dataset.num_universities = 200;
  spec.dataset.num_edges = 1000;
  spec.query.k = 10;
  spec.repetitions = 3;
  spec.warmups = 0;
  return spec;
}

}  // namespace

TEST(Bench, SingleWorkerSpeedupsAreOne) {
  auto spec = small_spec();
  spec.workers = {1};
  spec.modes = {bench::Mode::simple, bench::Mode::optimized, bench::Mode::oracle};
  const auto records = bench::run_bench(spec);
  EXPECT_EQ(records.size(), 3u * 4u);
  for (const auto& r : records) {
    EXPECT_EQ(r.workers, 1u);
    EXPECT_EQ(r.speedup, 1.0);
    EXPECT_GE(r.runtime_ms, 0.0);
  }
}

TEST(Bench, StageNamesAndGrid) {
  auto spec = small_spec();
  spec.workers = {1, 2};
  spec.modes = {bench::Mode::optimized, bench::Mode::oracle};
  spec.generic = bench::GenericQuery{kAwardAnchor, EntityId{302}, 2, 3};
  const auto records = bench::run_bench(spec);
  std::set<std::string> stages;
  std::size_t oracle_rows = 0;
  for (const auto& r : records) {
    stages.insert(r.stage);
    if (r.mode == "oracle") {
      ++oracle_rows;
      EXPECT_EQ(r.workers, 1u);
    }
  }
  EXPECT_EQ(stages, (std::set<std::string>{"multiHopReasoning", "computeScorePerPerson",
                                           "computeScoreBasedOnWorksInDL",
                                           "computeAffiliationScore", "genericMHR"}));
  EXPECT_EQ(oracle_rows, 5u);
  EXPECT_EQ(records.size(), 5u * 2u + 5u);
}

TEST(Bench, BaselineAddedWhenMissing) {
  auto spec = small_spec();
  spec.workers = {2};
  spec.modes = {bench::Mode::optimized};
  const auto records = bench::run_bench(spec);
  ASSERT_EQ(records.size(), 4u);
  for (const auto& r : records) EXPECT_EQ(r.workers, 2u);
}

TEST(Bench, InvalidSpecs) {
  auto spec = small_spec();
  spec.repetitions = 2;
  EXPECT_THROW(bench::validate(spec), ArgumentError);
  spec = small_spec();
  spec.workers = {4, 2};
  EXPECT_THROW(bench::validate(spec), ArgumentError);
  spec.workers = {};
  EXPECT_THROW(bench::validate(spec), ArgumentError);
  EXPECT_THROW(bench::parse_mode("fast"), ArgumentError);
}

TEST(Bench, SameSeedSameAnswers) {
  const auto spec = small_spec();
  ThreadTeam team(2);
  const auto a = build_store(generate(spec.dataset), team);
  const auto b = build_store(generate(spec.dataset), team);
  const auto q = generate(spec.dataset).default_query(10);
  EXPECT_EQ(three_hop_query(a, q, PipelineMode::optimized, team),
            three_hop_query(b, q, PipelineMode::optimized, team));
  EXPECT_NO_THROW(bench::cross_check(a, spec));
}

TEST(Bench, Median) {
  EXPECT_EQ(bench::median({3, 1, 2}), 2.0);
  EXPECT_EQ(bench::median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(bench::median({}), ArgumentError);
}

TEST(Bench, CsvRoundTrip) {
  const std::vector<bench::BenchRecord> records{{"computeAffiliationScore", "optimized", 4, 1.0 / 3.0, 2.75},
                                                {"multiHopReasoning", "simple", 1, 12.5, 1.0}};
  std::stringstream csv;
  bench::write_csv(csv, records);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "stage,mode,workers,runtime_ms,speedup");
  bench::write_csv(csv, records, false);  // appended block
  const auto back = bench::read_csv(csv);
  ASSERT_EQ(back.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& want = records[i % 2];
    EXPECT_EQ(back[i].stage, want.stage);
    EXPECT_EQ(back[i].mode, want.mode);
    EXPECT_EQ(back[i].workers, want.workers);
    EXPECT_EQ(back[i].runtime_ms, want.runtime_ms);
    EXPECT_EQ(back[i].speedup, want.speedup);
  }
  std::istringstream bad("a,b,c\n");
  EXPECT_THROW(bench::read_csv(bad), ParseError);
}
