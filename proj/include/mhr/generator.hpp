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
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mhr/error.hpp"
#include "mhr/format.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/parallel.hpp"
#include "mhr/pipeline.hpp"
#include "mhr/types.hpp"

namespace mhr {

// Synthetic academic KG.
//
// Entity layout: 0 = award anchor, 1 = field anchor, then persons, then
// universities, then background entities. Relations 0, 1, 2 are
// award-winner, works-in and affiliated-with; the rest are background.
// The first `plants` persons sit at anchor + relation + N(0, sigma), and
// the i-th planted university sits at planted person i + affiliated + noise.
struct GeneratorSpec {
  std::size_t num_entities = 10000;
  std::size_t num_relations = 8;
  std::size_t num_persons = 2000;
  std::size_t num_universities = 500;
  std::size_t num_edges = 20000;  // background edges on relations >= 3
  std::size_t dim = 8;
  std::uint64_t seed = 42;
  double sigma = 0.01;
  std::size_t plants = 10;
  std::size_t affiliations_per_person = 3;
};

inline constexpr RelationId kAwardWinner{0};
inline constexpr RelationId kWorksIn{1};
inline constexpr RelationId kAffiliatedWith{2};
inline constexpr EntityId kAwardAnchor{0};
inline constexpr EntityId kFieldAnchor{1};

struct SyntheticKG {
  GeneratorSpec spec;
  std::vector<Triple> triples;
  std::vector<std::pair<EntityId, Embedding>> entity_embeddings;
  std::vector<Embedding> relation_embeddings;
  std::vector<std::pair<std::string, EntityId>> labels;
  std::vector<EntityId> planted_persons;
  std::vector<EntityId> planted_universities;

  EntityId person(std::size_t i) const { return EntityId{2 + i}; }
  EntityId university(std::size_t i) const { return EntityId{2 + spec.num_persons + i}; }

  // The query the layout is built for.
  ThreeHopQuery default_query(std::size_t k = 50, double gamma = kDefaultGamma) const {
    return {kAwardAnchor, kAwardWinner, kFieldAnchor, kWorksIn, kAffiliatedWith, k, gamma};
  }
};

inline void validate(const GeneratorSpec& s) {
  if (s.dim == 0) throw ArgumentError("dim must be at least 1");
  if (s.num_relations < 3) throw ArgumentError("need at least 3 relations");
  if (!(s.sigma >= 0.0) || !std::isfinite(s.sigma)) throw ArgumentError("sigma must be >= 0");
  if (s.num_persons == 0) throw ArgumentError("need at least one person");
  if (s.num_universities == 0) throw ArgumentError("need at least one university");
  if (s.num_persons + s.num_universities + 2 > s.num_entities) {
    throw ArgumentError("persons + universities + 2 anchors exceed the entity count");
  }
  if (s.plants > s.num_persons) throw ArgumentError("more plants than persons");
  if (s.num_edges > 0 && s.num_relations == 3) {
    throw ArgumentError("background edges need a relation beyond the first three");
  }
  if (s.affiliations_per_person == 0) throw ArgumentError("affiliations per person must be >= 1");
}

inline SyntheticKG generate(const GeneratorSpec& spec) {
  validate(spec);
  SyntheticKG kg;
  kg.spec = spec;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, spec.sigma > 0.0 ? spec.sigma : 1.0);
  auto random_vector = [&] {
    Embedding v(spec.dim);
    for (auto& x : v) x = coord(rng);
    return v;
  };
  auto near = [&](const Embedding& centre) {
    Embedding v = centre;
    if (spec.sigma > 0.0) {
      for (auto& x : v) x += noise(rng);
    }
    return v;
  };
  auto uniform_index = [&](std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };

  // Embeddings
  for (std::size_t r = 0; r < spec.num_relations; ++r) kg.relation_embeddings.push_back(random_vector());
  std::vector<Embedding> entities(spec.num_entities);
  for (auto& e : entities) e = random_vector();
  const auto award_composite = embedding_aggregation(entities[0], kg.relation_embeddings[0]);
  for (std::size_t i = 0; i < spec.plants; ++i) {
    entities[to_underlying(kg.person(i))] = near(award_composite);
    kg.planted_persons.push_back(kg.person(i));
  }
  for (std::size_t i = 0; i < std::min(spec.plants, spec.num_universities); ++i) {
    const auto composite = embedding_aggregation(entities[to_underlying(kg.person(i))],
                                                 kg.relation_embeddings[2]);
    entities[to_underlying(kg.university(i))] = near(composite);
    kg.planted_universities.push_back(kg.university(i));
  }
  for (std::size_t i = 0; i < spec.num_entities; ++i) {
    kg.entity_embeddings.emplace_back(EntityId{i}, std::move(entities[i]));
  }

  // Structural edges
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < spec.num_persons; ++i) {
    kg.triples.push_back({kAwardAnchor, kAwardWinner, kg.person(i)});
    if (i < spec.plants || coin(rng)) kg.triples.push_back({kFieldAnchor, kWorksIn, kg.person(i)});
  }
  for (std::size_t u = 0; u < spec.num_universities; ++u) {
    const std::size_t owner = u < kg.planted_universities.size() ? u : uniform_index(spec.num_persons);
    kg.triples.push_back({kg.person(owner), kAffiliatedWith, kg.university(u)});
  }
  for (std::size_t i = 0; i < spec.num_persons; ++i) {
    for (std::size_t a = 1; a < spec.affiliations_per_person; ++a) {
      kg.triples.push_back(
          {kg.person(i), kAffiliatedWith, kg.university(uniform_index(spec.num_universities))});
    }
  }

  // Background edges
  for (std::size_t e = 0; e < spec.num_edges; ++e) {
    const auto head = EntityId{uniform_index(spec.num_entities)};
    const auto rel = RelationId{static_cast<std::uint32_t>(3 + uniform_index(spec.num_relations - 3))};
    const auto tail = EntityId{uniform_index(spec.num_entities)};
    kg.triples.push_back({head, rel, tail});
  }

  kg.labels = {{"TURING_AWARD", kAwardAnchor}, {"DEEP_LEARNING", kFieldAnchor}};
  return kg;
}

// On-disk text renderings.
inline void write_edges(std::ostream& os, const SyntheticKG& kg) {
  for (const auto& t : kg.triples) write_triple(os, t);
}
inline void write_entity_embeddings(std::ostream& os, const SyntheticKG& kg) {
  for (const auto& [id, v] : kg.entity_embeddings) write_embedding_row(os, to_underlying(id), v);
}
inline void write_relation_embeddings(std::ostream& os, const SyntheticKG& kg) {
  for (std::size_t r = 0; r < kg.relation_embeddings.size(); ++r) {
    write_embedding_row(os, r, kg.relation_embeddings[r]);
  }
}
inline void write_labels(std::ostream& os, const SyntheticKG& kg) {
  for (const auto& [label, id] : kg.labels) os << label << '\t' << to_underlying(id) << '\n';
}
// kind<TAB>entity_id, kind is "person" or "university".
inline void write_plants(std::ostream& os, const SyntheticKG& kg) {
  for (EntityId p : kg.planted_persons) os << "person\t" << to_underlying(p) << '\n';
  for (EntityId u : kg.planted_universities) os << "university\t" << to_underlying(u) << '\n';
}

struct DatasetPaths {
  std::filesystem::path edges;
  std::filesystem::path entity_embeddings;
  std::filesystem::path relation_embeddings;
  std::filesystem::path labels;
  std::filesystem::path plants;

  static DatasetPaths in(const std::filesystem::path& dir) {
    return {dir / "edges.tsv", dir / "entity_embeddings.tsv", dir / "relation_embeddings.tsv",
            dir / "labels.tsv", dir / "plants.tsv"};
  }
};

inline DatasetPaths write_dataset(const SyntheticKG& kg, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto paths = DatasetPaths::in(dir);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    return out;
  };
  {
    auto out = open(paths.edges);
    write_edges(out, kg);
  }
  {
    auto out = open(paths.entity_embeddings);
    write_entity_embeddings(out, kg);
  }
  {
    auto out = open(paths.relation_embeddings);
    write_relation_embeddings(out, kg);
  }
  {
    auto out = open(paths.labels);
    write_labels(out, kg);
  }
  {
    auto out = open(paths.plants);
    write_plants(out, kg);
  }
  return paths;
}

// Loads the generated data through the same text loaders used for files.
inline KGStore build_store(const SyntheticKG& kg, ThreadTeam& team) {
  std::stringstream edges, entities, relations;
  write_edges(edges, kg);
  write_entity_embeddings(entities, kg);
  write_relation_embeddings(relations, kg);
  return load_store(edges, entities, relations, kg.spec.dim, kg.spec.num_relations, team);
}

}  // namespace mhr
