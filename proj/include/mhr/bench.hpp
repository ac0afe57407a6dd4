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
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "mhr/error.hpp"
#include "mhr/format.hpp"
#include "mhr/generator.hpp"
#include "mhr/generic.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/oracle.hpp"
#include "mhr/parallel.hpp"
#include "mhr/pipeline.hpp"

namespace mhr::bench {

inline constexpr const char* kStageTotal = "multiHopReasoning";
inline constexpr const char* kStagePerson = "computeScorePerPerson";
inline constexpr const char* kStageWorksIn = "computeScoreBasedOnWorksInDL";
inline constexpr const char* kStageAffiliation = "computeAffiliationScore";
inline constexpr const char* kStageGeneric = "genericMHR";

enum class Mode { simple, optimized, oracle };

inline const char* to_string(Mode m) noexcept {
  switch (m) {
    case Mode::simple: return "simple";
    case Mode::optimized: return "optimized";
    case Mode::oracle: return "oracle";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  if (s == "simple") return Mode::simple;
  if (s == "optimized") return Mode::optimized;
  if (s == "oracle") return Mode::oracle;
  throw ArgumentError("unknown mode '" + s + "'");
}

struct GenericQuery {
  EntityId source{0};
  EntityId target{0};
  std::size_t hops = 3;
  std::size_t k = 5;
};

struct BenchSpec {
  GeneratorSpec dataset;
  ThreeHopQuery query;  // k and gamma used from here
  std::vector<Mode> modes{Mode::simple, Mode::optimized};
  std::vector<std::size_t> workers{1, 2, 4, 8};
  std::size_t repetitions = 5;
  std::size_t warmups = 1;
  MergeStrategy merge = MergeStrategy::tree;
  std::optional<GenericQuery> generic;
};

struct BenchRecord {
  std::string stage;
  std::string mode;
  std::size_t workers;
  double runtime_ms;  // median over repetitions
  double speedup;     // runtime(workers = 1) / runtime
};

inline void validate(const BenchSpec& spec) {
  if (spec.repetitions < 3) throw ArgumentError("need at least 3 repetitions for a median");
  if (spec.workers.empty()) throw ArgumentError("no worker counts given");
  if (spec.modes.empty()) throw ArgumentError("no modes given");
  for (std::size_t i = 0; i < spec.workers.size(); ++i) {
    if (spec.workers[i] == 0) throw ArgumentError("worker counts must be >= 1");
    if (i > 0 && spec.workers[i] <= spec.workers[i - 1]) {
      throw ArgumentError("worker counts must be strictly ascending");
    }
  }
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw ArgumentError("median of nothing");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace detail {

struct Sample {
  StageTimings stages;
  double generic_ms = 0.0;
};

inline Sample run_once(const KGStore& store, const BenchSpec& spec, Mode mode, ThreadTeam& team) {
  Sample s;
  if (mode == Mode::oracle) {
    oracle::oracle_three_hop(store, spec.query, &s.stages);
  } else {
    QueryDiagnostics diag;
    three_hop_query(store, spec.query,
                    mode == Mode::simple ? PipelineMode::simple : PipelineMode::optimized, team,
                    spec.merge, &diag);
    s.stages = diag.timings;
  }
  if (spec.generic) {
    const auto& g = *spec.generic;
    const mhr::detail::StopWatch clock;
    if (mode == Mode::oracle) {
      oracle::oracle_beam_paths(store, g.source, g.target, g.hops, g.k, spec.query.gamma);
    } else {
      multihop_reasoning_generic(store, g.source, g.target, g.hops, {g.k, spec.query.gamma}, team);
    }
    s.generic_ms = clock.elapsed_ms();
  }
  return s;
}

}  // namespace detail

// Checks optimized, simple and oracle agree on `store`; throws on mismatch.
inline void cross_check(const KGStore& store, const BenchSpec& spec) {
  ThreadTeam team(spec.workers.back());
  const auto reference = oracle::oracle_three_hop(store, spec.query);
  const auto simple = three_hop_query(store, spec.query, PipelineMode::simple, team, spec.merge);
  const auto optimized =
      three_hop_query(store, spec.query, PipelineMode::optimized, team, spec.merge);
  if (!equivalent(simple, reference) || !equivalent(optimized, reference)) {
    throw Error("correctness cross-check failed: modes disagree");
  }
  if (spec.generic) {
    const auto& g = *spec.generic;
    const auto engine =
        multihop_reasoning_generic(store, g.source, g.target, g.hops, {g.k, spec.query.gamma}, team);
    if (engine != oracle::oracle_beam_paths(store, g.source, g.target, g.hops, g.k,
                                            spec.query.gamma)) {
      throw Error("correctness cross-check failed: generic engine disagrees with oracle");
    }
  }
}

// Times every (stage, mode, workers) cell on an already-built store. The
// oracle is single-threaded and is timed once, at workers = 1.
inline std::vector<BenchRecord> run_bench(const KGStore& store, const BenchSpec& spec,
                                          std::ostream* log = nullptr) {
  validate(spec);
  cross_check(store, spec);

  const auto hw = std::thread::hardware_concurrency();
  std::vector<std::size_t> counts = spec.workers;
  if (counts.front() != 1) counts.insert(counts.begin(), 1);

  std::vector<BenchRecord> records;
  for (Mode mode : spec.modes) {
    // stage -> workers -> median
    std::map<std::string, std::map<std::size_t, double>> medians;
    for (std::size_t w : counts) {
      if (mode == Mode::oracle && w != 1) continue;
      if (log != nullptr && hw != 0 && w > hw) {
        *log << "warning: " << w << " workers exceed " << hw
             << " hardware threads; running oversubscribed\n";
      }
      ThreadTeam team(w);
      for (std::size_t i = 0; i < spec.warmups; ++i) detail::run_once(store, spec, mode, team);
      std::vector<double> total, person, works_in, affiliation, generic;
      for (std::size_t i = 0; i < spec.repetitions; ++i) {
        const auto s = detail::run_once(store, spec, mode, team);
        total.push_back(s.stages.total_ms);
        person.push_back(s.stages.score_per_person_ms);
        works_in.push_back(s.stages.works_in_ms);
        affiliation.push_back(s.stages.affiliation_ms);
        generic.push_back(s.generic_ms);
      }
      medians[kStageTotal][w] = median(total);
      medians[kStagePerson][w] = median(person);
      medians[kStageWorksIn][w] = median(works_in);
      medians[kStageAffiliation][w] = median(affiliation);
      if (spec.generic) medians[kStageGeneric][w] = median(generic);
    }
    for (const char* stage :
         {kStageTotal, kStagePerson, kStageWorksIn, kStageAffiliation, kStageGeneric}) {
      auto it = medians.find(stage);
      if (it == medians.end()) continue;
      const double base = it->second.at(1);
      for (std::size_t w : spec.workers) {
        auto cell = it->second.find(w);
        if (cell == it->second.end()) continue;
        records.push_back({stage, to_string(mode), w, cell->second,
                           w == 1 ? 1.0 : (cell->second > 0.0 ? base / cell->second : 0.0)});
      }
    }
  }
  return records;
}

// Generates the dataset, builds the store, then times it.
inline std::vector<BenchRecord> run_bench(const BenchSpec& spec, std::ostream* log = nullptr) {
  validate(spec);
  const auto kg = generate(spec.dataset);
  ThreadTeam loader(spec.workers.back());
  const auto store = build_store(kg, loader);
  return run_bench(store, spec, log);
}

inline constexpr const char* kCsvHeader = "stage,mode,workers,runtime_ms,speedup";

inline void write_csv(std::ostream& os, const std::vector<BenchRecord>& records,
                      bool header = true) {
  if (header) os << kCsvHeader << '\n';
  for (const auto& r : records) {
    os << r.stage << ',' << r.mode << ',' << r.workers << ',' << format_double(r.runtime_ms) << ','
       << format_double(r.speedup) << '\n';
  }
}

// Parses CSV produced by write_csv (header required).
inline std::vector<BenchRecord> read_csv(std::istream& in) {
  std::vector<BenchRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line == kCsvHeader) continue;
    std::vector<std::string> f;
    std::size_t pos = 0;
    for (;;) {
      const auto comma = line.find(',', pos);
      f.push_back(line.substr(pos, comma - pos));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (f.size() != 5) throw ParseError(n, "expected 5 CSV fields");
    try {
      out.push_back({f[0], f[1], std::stoul(f[2]), std::stod(f[3]), std::stod(f[4])});
    } catch (const std::logic_error&) {
      throw ParseError(n, "malformed CSV number");
    }
  }
  return out;
}

inline void write_table(std::ostream& os, const std::vector<BenchRecord>& records) {
  os << std::left << std::setw(30) << "stage" << std::setw(11) << "mode" << std::setw(9)
     << "workers" << std::setw(14) << "runtime_ms" << "speedup\n";
  for (const auto& r : records) {
    os << std::left << std::setw(30) << r.stage << std::setw(11) << r.mode << std::setw(9)
       << r.workers << std::setw(14) << std::fixed << std::setprecision(3) << r.runtime_ms
       << std::setprecision(2) << r.speedup << '\n';
    os.unsetf(std::ios::fixed);
  }
}

}  // namespace mhr::bench
