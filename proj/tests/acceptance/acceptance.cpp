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

// Acceptance gate. One line per criterion:
//   AC<n> PASS|FAIL|BLOCKED  <summary>
// Usage: acceptance [correctness|performance|all] [--csv path]
// Exit 0 when everything selected passes, 1 on any FAIL, 77 when nothing
// failed but a timing criterion was blocked by the hardware.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mhr/mhr.hpp"

using namespace mhr;

namespace {

// Pinned tolerances and thresholds.
constexpr double kScoreTolerance = 1e-9;
constexpr double kKernelTolerance = 1e-12;
constexpr double kBaselineGapFloor = 4.0;
constexpr double kScalingFloor = 3.0;
constexpr std::size_t kPerfThreads = 8;
constexpr std::size_t kPerfMinCores = 8;
constexpr std::size_t kScalingHarnessRuns = 3;

enum class Status { pass, fail, blocked };

struct Verdict {
  Status status;
  std::string detail;
};

const char* label(Status s) {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::blocked: return "BLOCKED";
  }
  return "?";
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

Verdict within_budget(bool ok, std::string detail, const Clock& clock, double budget_s) {
  const double t = clock.seconds();
  detail += " in " + fmt(t, 1) + " s (budget " + fmt(budget_s, 0) + " s)";
  if (ok && t > budget_s) ok = false;
  return {ok ? Status::pass : Status::fail, detail};
}

// Distinct (physical id, core id) pairs; falls back to logical CPUs.
std::size_t physical_cores() {
  std::ifstream in("/proc/cpuinfo");
  std::set<std::pair<int, int>> cores;
  int phys = 0;
  std::string line;
  while (std::getline(in, line)) {
    auto value = [&] { return std::stoi(line.substr(line.find(':') + 1)); };
    if (line.rfind("physical id", 0) == 0) phys = value();
    if (line.rfind("core id", 0) == 0) cores.insert({phys, value()});
  }
  if (!cores.empty()) return cores.size();
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------
// Random graph helpers
// ---------------------------------------------------------------------------

Embedding random_vector(std::mt19937_64& rng, std::size_t dim, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Embedding v(dim);
  for (auto& x : v) x = u(rng);
  return v;
}

KGStore random_store(std::mt19937_64& rng, std::size_t nodes, std::size_t relations,
                     std::size_t edges, std::size_t dim, double missing_rate, ThreadTeam& team) {
  std::stringstream e, n, r;
  for (std::size_t i = 0; i < relations; ++i) write_embedding_row(r, i, random_vector(rng, dim, -0.5, 0.5));
  std::bernoulli_distribution missing(missing_rate);
  for (std::size_t i = 0; i < nodes; ++i) {
    const auto v = random_vector(rng, dim);
    if (!missing(rng)) write_embedding_row(n, i, v);
  }
  std::uniform_int_distribution<std::uint64_t> node(0, nodes - 1);
  std::uniform_int_distribution<std::uint32_t> rel(0, static_cast<std::uint32_t>(relations - 1));
  for (std::size_t i = 0; i < edges; ++i) write_triple(e, {EntityId{node(rng)}, RelationId{rel(rng)}, EntityId{node(rng)}});
  return load_store(e, n, r, dim, relations, team);
}

GeneratorSpec ac1_dataset(std::uint64_t seed) {
  GeneratorSpec spec;
  spec.num_entities = 10000;
  spec.num_persons = 2000;
  spec.num_universities = 500;
  spec.dim = 8;
  spec.sigma = 0.01;
  spec.seed = seed;
  return spec;
}

// ---------------------------------------------------------------------------
// Correctness criteria
// ---------------------------------------------------------------------------

Verdict ac1() {
  const Clock clock;
  ThreadTeam team(4);
  std::size_t ok = 0;
  const std::size_t seeds = 100;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    const auto kg = generate(ac1_dataset(seed));
    const auto store = build_store(kg, team);
    const auto q = kg.default_query(50);
    const auto reference = oracle::oracle_three_hop(store, q);
    const auto simple = three_hop_query(store, q, PipelineMode::simple, team);
    const auto optimized = three_hop_query(store, q, PipelineMode::optimized, team);
    if (equivalent(simple, reference, kScoreTolerance) &&
        equivalent(optimized, reference, kScoreTolerance) && reference.ranked_persons.size() == 50) {
      ++ok;
    }
  }
  return within_budget(ok == seeds,
                       "three-hop optimized == simple == oracle on " + std::to_string(ok) + "/" +
                           std::to_string(seeds) + " seeds",
                       clock, 120);
}

Verdict ac2() {
  const Clock clock;
  std::mt19937_64 rng(2024);
  std::size_t cases = 0, ok = 0;
  std::vector<std::size_t> lengths{0, 1, 2, 3, 10, 100, 1000, 10000, 100000};
  std::uniform_int_distribution<std::size_t> any_length(0, 100000);
  for (int i = 0; i < 12; ++i) lengths.push_back(any_length(rng));
  for (std::size_t k : {1u, 2u, 5u, 50u}) {
    for (std::size_t n : lengths) {
      // small score and id alphabets force score ties and repeated ids
      std::uniform_int_distribution<int> score(-50, 50);
      std::uniform_int_distribution<std::uint64_t> id(0, std::max<std::size_t>(n / 4, 3));
      std::bernoulli_distribution missing(0.02);
      std::vector<ScoredEntity> items;
      items.reserve(n);
      TopKSelector<ScoredEntity> selector(k);
      for (std::size_t j = 0; j < n; ++j) {
        const ScoredEntity item{EntityId{id(rng)}, missing(rng) ? kMissingScore : score(rng) / 8.0};
        items.push_back(item);
        selector.offer(item);
      }
      ++cases;
      if (std::move(selector).into_sorted_desc() == oracle::oracle_topk(std::move(items), k)) ++ok;
    }
  }
  return within_budget(ok == cases,
                       "selector == full sort on " + std::to_string(ok) + "/" + std::to_string(cases) +
                           " offer sequences, K in {1,2,5,50}",
                       clock, 30);
}

Verdict ac3() {
  const Clock clock;
  std::mt19937_64 rng(77);
  ThreadTeam team(17);
  std::size_t ok = 0;
  const std::size_t cases = 1000;
  for (std::size_t c = 0; c < cases; ++c) {
    const std::size_t workers = 1 + c % 17;
    const std::size_t k = 1 + rng() % 8;
    std::uniform_int_distribution<int> score(-10, 10);
    std::vector<TopKSelector<ScoredEntity>> locals;
    for (std::size_t w = 0; w < workers; ++w) {
      TopKSelector<ScoredEntity> s(k);
      const std::size_t n = rng() % 16;
      for (std::size_t i = 0; i < n; ++i) {
        s.offer({EntityId{rng() % 64}, rng() % 50 == 0 ? kMissingScore : score(rng) * 0.5});
      }
      locals.push_back(std::move(s));
    }
    const auto fold = oracle::oracle_fold_merge<ScoredEntity>(locals).sorted_desc();
    const auto tree = reduce_selectors(locals, team, MergeStrategy::tree).sorted_desc();
    const auto locked = reduce_selectors(locals, team, MergeStrategy::locked).sorted_desc();
    if (tree == fold && locked == fold) ++ok;
  }
  return within_budget(ok == cases,
                       "tree == locked == fold on " + std::to_string(ok) + "/" + std::to_string(cases) +
                           " cases, workers 1..17",
                       clock, 30);
}

Verdict ac4() {
  const Clock clock;
  std::mt19937_64 rng(4);
  std::size_t exact = 0, close = 0, total = 0;
  double worst = 0.0, worst_extended = 0.0;
  for (std::size_t dim : {1u, 8u, 768u}) {
    for (int i = 0; i < 10000; ++i) {
      const auto c = random_vector(rng, dim);
      const auto t = random_vector(rng, dim);
      const double gamma = 1.0;
      ++total;
      if (transe_score(c, c, gamma) == gamma) ++exact;
      double distance = 0.0;
      long double distance_ld = 0.0L;
      for (std::size_t j = 0; j < dim; ++j) {
        distance += std::abs(c[j] - t[j]);
        distance_ld += std::abs(static_cast<long double>(c[j]) - static_cast<long double>(t[j]));
      }
      const double got = transe_score(c, t, gamma);
      const double err = std::abs(got - (gamma - distance));
      worst = std::max(worst, err);
      worst_extended = std::max(
          worst_extended, static_cast<double>(std::abs(static_cast<long double>(got) - (gamma - distance_ld))));
      if (err <= kKernelTolerance) ++close;
    }
  }
  std::ostringstream d;
  d << "score(c,c)==gamma on " << exact << "/" << total << ", |score - direct| <= 1e-12 on "
    << close << "/" << total << " (worst " << worst << "; vs long double " << worst_extended
    << "), dim in {1,8,768}";
  return within_budget(exact == total && close == total, d.str(), clock, 60);
}

Verdict ac5() {
  const Clock clock;
  const std::vector<std::size_t> thread_counts{1, 2, 4, 8, 16};
  std::vector<std::unique_ptr<ThreadTeam>> teams;
  for (auto t : thread_counts) teams.push_back(std::make_unique<ThreadTeam>(t));
  std::size_t ok = 0;
  const std::size_t seeds = 10;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    auto spec = ac1_dataset(seed);
    const auto kg = generate(spec);
    const auto q = kg.default_query(50);
    bool same = true;
    std::optional<AffiliationResult> three_hop;
    std::optional<std::vector<ScoredPath>> kg_paths, random_paths;
    std::mt19937_64 graph_rng(seed);
    ThreadTeam builder(1);
    const auto graph = random_store(graph_rng, 200, 3, 1200, 8, 0.0, builder);
    for (auto& team : teams) {
      // the store itself is also built at every worker count
      const auto store = build_store(kg, *team);
      for (auto mode : {PipelineMode::optimized, PipelineMode::simple}) {
        for (auto merge : {MergeStrategy::tree, MergeStrategy::locked}) {
          auto r = three_hop_query(store, q, mode, *team, merge);
          if (!three_hop) three_hop = std::move(r);
          else same = same && r == *three_hop;
        }
      }
      auto p = multihop_reasoning_generic(store, kAwardAnchor, kg.university(0), 3, {5}, *team);
      if (!kg_paths) kg_paths = std::move(p);
      else same = same && p == *kg_paths;
      auto g = multihop_reasoning_generic(graph, EntityId{0}, EntityId{1}, 4, {5}, *team);
      if (!random_paths) random_paths = std::move(g);
      else same = same && g == *random_paths;
    }
    if (same) ++ok;
  }
  return within_budget(ok == seeds,
                       "three-hop and generic identical for threads {1,2,4,8,16} on " +
                           std::to_string(ok) + "/" + std::to_string(seeds) + " seeds",
                       clock, 300);
}

Verdict ac6() {
  const Clock clock;
  std::mt19937_64 rng(6);
  ThreadTeam team(4), builder(1);
  std::size_t beam_ok = 0, beam_cases = 0, exhaustive_ok = 0, exhaustive_cases = 0, nonempty = 0;
  while (beam_cases < 50) {
    const std::size_t nodes = 20 + rng() % 181;
    const auto store = random_store(rng, nodes, 1 + rng() % 4, nodes * (2 + rng() % 5), 4, 0.03, builder);
    const EntityId s{rng() % nodes}, t{rng() % nodes};
    if (store.entity_embedding(s) == nullptr) continue;
    const std::size_t hops = 1 + rng() % 4, k = 1 + rng() % 5;
    ++beam_cases;
    const auto engine = multihop_reasoning_generic(store, s, t, hops, {k}, team);
    if (!engine.empty()) ++nonempty;
    if (engine == oracle::oracle_beam_paths(store, s, t, hops, k)) ++beam_ok;
  }
  while (exhaustive_cases < 20) {
    const std::size_t nodes = 10 + rng() % 21;
    const auto store = random_store(rng, nodes, 1 + rng() % 2, nodes * 2, 3, 0.0, builder);
    const EntityId s{rng() % nodes}, t{rng() % nodes};
    const std::size_t hops = 1 + rng() % 4;
    const std::size_t k = 1000000;  // never truncates
    ++exhaustive_cases;
    if (multihop_reasoning_generic(store, s, t, hops, {k}, team) ==
        oracle::oracle_exhaustive_paths(store, s, t, hops, k)) {
      ++exhaustive_ok;
    }
  }
  const std::size_t capacity = total_frontier_capacity(50, 3);
  std::ostringstream d;
  d << "engine == beam oracle on " << beam_ok << "/" << beam_cases << " graphs (" << nonempty
    << " with hits), == exhaustive on " << exhaustive_ok << "/" << exhaustive_cases
    << ", capacity(50,3) = " << capacity;
  return within_budget(beam_ok == beam_cases && exhaustive_ok == exhaustive_cases && capacity == 51,
                       d.str(), clock, 120);
}

// ---------------------------------------------------------------------------
// Performance criteria
// ---------------------------------------------------------------------------

bench::BenchSpec perf_spec() {
  bench::BenchSpec spec;
  spec.dataset.num_entities = 30000;
  spec.dataset.num_persons = 2000;
  spec.dataset.num_universities = 20000;  // 50 persons x 20k = 1e6 affiliation evaluations
  spec.dataset.num_edges = 20000;
  spec.dataset.dim = 8;
  spec.dataset.seed = 7;
  spec.query.k = 50;
  spec.modes = {bench::Mode::simple, bench::Mode::optimized};
  spec.workers = {1, kPerfThreads};
  spec.repetitions = 5;
  spec.warmups = 1;
  return spec;
}

struct PerfData {
  std::vector<std::vector<bench::BenchRecord>> runs;  // one per harness run, re-read from CSV
  double seconds = 0.0;
};

PerfData collect(const std::string& csv_path) {
  const Clock clock;
  auto spec = perf_spec();
  const auto kg = generate(spec.dataset);
  spec.query = kg.default_query(50);
  ThreadTeam loader(kPerfThreads);
  const auto store = build_store(kg, loader);
  {
    std::ofstream truncate(csv_path);
  }
  PerfData data;
  for (std::size_t run = 0; run < kScalingHarnessRuns; ++run) {
    const auto records = bench::run_bench(store, spec, run == 0 ? &std::cerr : nullptr);
    std::ofstream out(csv_path, std::ios::app);
    bench::write_csv(out, records, run == 0);
  }
  std::ifstream in(csv_path);
  const auto all = bench::read_csv(in);
  const std::size_t per_run = all.size() / kScalingHarnessRuns;
  for (std::size_t run = 0; run < kScalingHarnessRuns; ++run) {
    data.runs.emplace_back(all.begin() + run * per_run, all.begin() + (run + 1) * per_run);
  }
  data.seconds = clock.seconds();
  return data;
}

double lookup(const std::vector<bench::BenchRecord>& records, const std::string& stage,
              const std::string& mode, std::size_t workers, bool speedup = false) {
  for (const auto& r : records) {
    if (r.stage == stage && r.mode == mode && r.workers == workers) return speedup ? r.speedup : r.runtime_ms;
  }
  throw Error("missing bench record " + stage + "/" + mode + "/" + std::to_string(workers));
}

Status performance_status(bool met, bool hardware_ok) {
  if (met) return Status::pass;
  return hardware_ok ? Status::fail : Status::blocked;
}

std::string hardware_note(bool hardware_ok, std::size_t cores) {
  if (hardware_ok) return "";
  return "; needs >= " + std::to_string(kPerfMinCores) + " physical cores, machine has " +
         std::to_string(cores);
}

Verdict ac7(const PerfData& data, std::size_t cores) {
  const auto& r = data.runs.front();
  const double simple = lookup(r, bench::kStageTotal, "simple", kPerfThreads);
  const double optimized = lookup(r, bench::kStageTotal, "optimized", kPerfThreads);
  const double gap = simple / optimized;
  const bool hardware_ok = cores >= kPerfMinCores;
  const bool met = gap >= kBaselineGapFloor && data.seconds <= 300;
  return {performance_status(met, hardware_ok),
          "simple/optimized end-to-end at " + std::to_string(kPerfThreads) + " threads = " + fmt(gap) +
              "x (floor " + fmt(kBaselineGapFloor, 1) + "x; " + fmt(simple, 1) + " vs " +
              fmt(optimized, 1) + " ms median)" + hardware_note(hardware_ok, cores)};
}

Verdict ac8(const PerfData& data, std::size_t cores) {
  double best = 0.0;
  std::string all;
  for (const auto& run : data.runs) {
    const double s = lookup(run, bench::kStageAffiliation, "optimized", kPerfThreads, true);
    best = std::max(best, s);
    all += (all.empty() ? "" : ", ") + fmt(s);
  }
  const bool hardware_ok = cores >= kPerfMinCores;
  return {performance_status(best >= kScalingFloor, hardware_ok),
          std::string(bench::kStageAffiliation) + " optimized speedup " +
              std::to_string(kPerfThreads) + " vs 1 threads: best " + fmt(best) + "x of [" + all +
              "] (floor " + fmt(kScalingFloor, 1) + "x)" + hardware_note(hardware_ok, cores)};
}

Verdict ac9(const PerfData& data) {
  std::size_t ok = 0, cells = 0;
  double min_share = 1.0;
  for (const auto& run : data.runs) {
    for (const char* mode : {"simple", "optimized"}) {
      for (std::size_t w : {std::size_t{1}, kPerfThreads}) {
        const double person = lookup(run, bench::kStagePerson, mode, w);
        const double works_in = lookup(run, bench::kStageWorksIn, mode, w);
        const double affiliation = lookup(run, bench::kStageAffiliation, mode, w);
        const double total = lookup(run, bench::kStageTotal, mode, w);
        ++cells;
        if (affiliation > person && affiliation > works_in) ++ok;
        min_share = std::min(min_share, affiliation / total);
      }
    }
  }
  return {ok == cells ? Status::pass : Status::fail,
          std::string(bench::kStageAffiliation) + " is the largest stage in " + std::to_string(ok) +
              "/" + std::to_string(cells) + " (mode, workers, run) cells; smallest share of " +
              bench::kStageTotal + " " + fmt(100.0 * min_share, 1) + "%"};
}

}  // namespace

int main(int argc, char** argv) {
  std::string suite = "all";
  std::string csv = "acceptance_bench.csv";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--csv" && i + 1 < argc) {
      csv = argv[++i];
    } else if (a == "correctness" || a == "performance" || a == "all") {
      suite = a;
    } else {
      std::cerr << "usage: acceptance [correctness|performance|all] [--csv path]\n";
      return 2;
    }
  }

  std::vector<std::pair<std::string, Verdict>> verdicts;
  auto record = [&](const std::string& id, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {Status::fail, std::string("threw: ") + e.what()};
    }
    std::cout << id << ' ' << label(v.status) << "  " << v.detail << std::endl;
    verdicts.emplace_back(id, v);
  };

  if (suite != "performance") {
    record("AC1", ac1);
    record("AC2", ac2);
    record("AC3", ac3);
    record("AC4", ac4);
    record("AC5", ac5);
    record("AC6", ac6);
  }
  if (suite != "correctness") {
    const std::size_t cores = physical_cores();
    std::optional<PerfData> data;
    std::string failure;
    try {
      data = collect(csv);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    auto guarded = [&](auto check) {
      return [&, check]() -> Verdict {
        if (!data) return {Status::fail, "bench run failed: " + failure};
        return check();
      };
    };
    record("AC7", guarded([&] { return ac7(*data, cores); }));
    record("AC8", guarded([&] { return ac8(*data, cores); }));
    record("AC9", guarded([&] { return ac9(*data); }));
  }

  bool failed = false, blocked = false;
  for (const auto& [id, v] : verdicts) {
    failed = failed || v.status == Status::fail;
    blocked = blocked || v.status == Status::blocked;
  }
  if (failed) return 1;
  return blocked ? 77 : 0;
}
