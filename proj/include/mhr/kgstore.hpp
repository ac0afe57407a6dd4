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
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mhr/concurrent_map.hpp"
#include "mhr/error.hpp"
#include "mhr/parallel.hpp"
#include "mhr/types.hpp"

namespace mhr {

// ---------------------------------------------------------------------------
// Line parsing
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::move(line));
  return lines;
}

inline std::uint64_t parse_u64(std::string_view field, std::size_t line, const char* what) {
  std::uint64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(line, std::string("malformed ") + what + " '" + std::string(field) + "'");
  }
  return value;
}

inline double parse_component(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range && ptr == last) {
    throw ValueError(line, "embedding component out of range '" + std::string(field) + "'");
  }
  if (field.empty() || ec != std::errc{} || ptr != last) {
    throw ParseError(line, "malformed embedding component '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw ValueError(line, "non-finite embedding component '" + std::string(field) + "'");
  }
  return value;
}

inline Triple parse_triple(std::string_view text, std::size_t line, std::size_t num_relations) {
  const auto t1 = text.find('\t');
  const auto t2 = t1 == std::string_view::npos ? t1 : text.find('\t', t1 + 1);
  if (t2 == std::string_view::npos || text.find('\t', t2 + 1) != std::string_view::npos) {
    throw ParseError(line, "expected head<TAB>relation<TAB>tail");
  }
  const auto head = parse_u64(text.substr(0, t1), line, "head id");
  const auto rel = parse_u64(text.substr(t1 + 1, t2 - t1 - 1), line, "relation id");
  const auto tail = parse_u64(text.substr(t2 + 1), line, "tail id");
  if (rel >= num_relations) {
    throw RangeError(line, "relation id " + std::to_string(rel) + " out of range [0, " +
                               std::to_string(num_relations) + ")");
  }
  return {EntityId{head}, RelationId{static_cast<std::uint32_t>(rel)}, EntityId{tail}};
}

struct EmbeddingRow {
  std::uint64_t id;
  Embedding values;
};

inline EmbeddingRow parse_embedding_row(std::string_view text, std::size_t line, std::size_t dim) {
  const auto tab = text.find('\t');
  if (tab == std::string_view::npos) throw ParseError(line, "expected id<TAB>components");
  EmbeddingRow row{parse_u64(text.substr(0, tab), line, "id"), {}};
  const std::string_view rest = text.substr(tab + 1);
  const auto count = 1 + static_cast<std::size_t>(std::count(rest.begin(), rest.end(), ' '));
  if (count != dim) {
    throw DimensionError(line, "expected " + std::to_string(dim) + " components, found " +
                                   std::to_string(count));
  }
  row.values.reserve(dim);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < dim; ++j) {
    const auto space = rest.find(' ', pos);
    row.values.push_back(parse_component(rest.substr(pos, space - pos), line));
    pos = space + 1;
  }
  return row;
}

// Runs parse_one(line_index) over all lines in parallel blocks. On any error,
// replays the lines sequentially through `validate` so that the reported
// error is exactly the one a single-threaded load would raise first.
template <class ParseOne, class Validate>
void parallel_lines(std::size_t n, ThreadTeam& team, ParseOne&& parse_one, Validate&& validate) {
  const std::size_t workers = team.size();
  std::atomic<bool> failed{false};
  team.run(workers, [&](std::size_t w) {
    const auto block = block_range(n, workers, w);
    try {
      for (std::size_t i = block.begin; i < block.end; ++i) {
        if (failed.load(std::memory_order_relaxed)) return;
        parse_one(i);
      }
    } catch (const Error&) {
      failed.store(true, std::memory_order_relaxed);
    }
  });
  if (failed.load()) {
    validate();
    throw Error("parallel load failed without a reproducible error");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Edge tables
// ---------------------------------------------------------------------------

// Head-keyed adjacency for one relation. Duplicate (head, tail) pairs are
// kept; tail lists are sorted ascending when the table is sealed.
class EdgeTable {
 public:
  explicit EdgeTable(RelationId relation, std::size_t stripes = 64)
      : relation_(relation), adjacency_(stripes) {}

  RelationId relation() const noexcept { return relation_; }

  void add(EntityId head, EntityId tail) {
    adjacency_.upsert(head, [tail](std::vector<EntityId>& tails) { tails.push_back(tail); });
  }

  void seal() {
    if (adjacency_.sealed()) return;
    std::size_t edges = 0;
    adjacency_.seal([&edges](std::vector<EntityId>& tails) {
      std::sort(tails.begin(), tails.end());
      edges += tails.size();
    });
    edge_count_ = edges;
  }

  bool sealed() const noexcept { return adjacency_.sealed(); }

  // Empty span for an absent head.
  std::span<const EntityId> tails(EntityId head) const {
    const auto* found = adjacency_.find(head);
    if (found == nullptr) return {};
    return {found->data(), found->size()};
  }

  std::size_t edge_count() const {
    require_sealed();
    return edge_count_;
  }

  std::size_t head_count() const { return adjacency_.size(); }

  std::vector<EntityId> heads() const {
    require_sealed();
    return adjacency_.sorted_keys();
  }

  // Visits (head, tails) pairs in unspecified head order.
  template <class Visit>
  void for_each(Visit&& visit) const {
    require_sealed();
    adjacency_.for_each([&](EntityId head, const std::vector<EntityId>& tails) {
      visit(head, std::span<const EntityId>(tails.data(), tails.size()));
    });
  }

  // Heads ascending, each with its sorted tail list.
  std::vector<std::pair<EntityId, std::vector<EntityId>>> canonical() const {
    std::vector<std::pair<EntityId, std::vector<EntityId>>> out;
    for (EntityId head : heads()) {
      auto t = tails(head);
      out.emplace_back(head, std::vector<EntityId>(t.begin(), t.end()));
    }
    return out;
  }

 private:
  void require_sealed() const {
    if (!sealed()) throw UsageError("edge table is not sealed");
  }

  RelationId relation_;
  ConcurrentMap<EntityId, std::vector<EntityId>> adjacency_;
  std::size_t edge_count_ = 0;
};

// Parses `head<TAB>relation<TAB>tail` lines into one sealed table per
// relation. Lines are split into contiguous blocks over the team; the sealed
// result does not depend on the team size.
inline std::vector<EdgeTable> ingest_edges(std::istream& in, std::size_t num_relations,
                                           ThreadTeam& team) {
  const auto lines = detail::read_lines(in);
  std::vector<EdgeTable> tables;
  tables.reserve(num_relations);
  for (std::size_t r = 0; r < num_relations; ++r) {
    tables.emplace_back(RelationId{static_cast<std::uint32_t>(r)});
  }
  detail::parallel_lines(
      lines.size(), team,
      [&](std::size_t i) {
        const Triple t = detail::parse_triple(lines[i], i + 1, num_relations);
        tables[to_underlying(t.relation)].add(t.head, t.tail);
      },
      [&] {
        for (std::size_t i = 0; i < lines.size(); ++i) {
          detail::parse_triple(lines[i], i + 1, num_relations);
        }
      });
  for (auto& table : tables) table.seal();
  return tables;
}

inline std::vector<EdgeTable> ingest_edges(std::istream& in, std::size_t num_relations,
                                           std::size_t workers = 1) {
  ThreadTeam team(workers);
  return ingest_edges(in, num_relations, team);
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

using EntityEmbeddingMap = ConcurrentMap<EntityId, Embedding>;

// Parses `id<TAB>v0 v1 ...` rows into a sealed map. Duplicate ids are an
// error, never last-write-wins.
inline EntityEmbeddingMap load_entity_embeddings(std::istream& in, std::size_t dim,
                                                 ThreadTeam& team) {
  if (dim == 0) throw ArgumentError("embedding dimension must be at least 1");
  const auto lines = detail::read_lines(in);
  EntityEmbeddingMap map(256);
  detail::parallel_lines(
      lines.size(), team,
      [&](std::size_t i) {
        auto row = detail::parse_embedding_row(lines[i], i + 1, dim);
        if (!map.insert(EntityId{row.id}, std::move(row.values))) {
          throw DuplicateError(i + 1, "duplicate entity id " + std::to_string(row.id));
        }
      },
      [&] {
        std::unordered_set<std::uint64_t> seen;
        for (std::size_t i = 0; i < lines.size(); ++i) {
          const auto row = detail::parse_embedding_row(lines[i], i + 1, dim);
          if (!seen.insert(row.id).second) {
            throw DuplicateError(i + 1, "duplicate entity id " + std::to_string(row.id));
          }
        }
      });
  map.seal();
  return map;
}

inline EntityEmbeddingMap load_entity_embeddings(std::istream& in, std::size_t dim,
                                                 std::size_t workers = 1) {
  ThreadTeam team(workers);
  return load_entity_embeddings(in, dim, team);
}

// Exactly one row per relation id 0..num_relations-1, in any order.
inline std::vector<Embedding> load_relation_embeddings(std::istream& in, std::size_t dim,
                                                       std::size_t num_relations) {
  if (dim == 0) throw ArgumentError("embedding dimension must be at least 1");
  const auto lines = detail::read_lines(in);
  std::vector<Embedding> table(num_relations);
  std::vector<bool> present(num_relations, false);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto row = detail::parse_embedding_row(lines[i], i + 1, dim);
    if (row.id >= num_relations) {
      throw RangeError(i + 1, "relation id " + std::to_string(row.id) + " out of range [0, " +
                                  std::to_string(num_relations) + ")");
    }
    if (present[row.id]) {
      throw CompletenessError(i + 1, "repeated relation id " + std::to_string(row.id));
    }
    present[row.id] = true;
    table[row.id] = std::move(row.values);
  }
  for (std::size_t r = 0; r < num_relations; ++r) {
    if (!present[r]) {
      throw CompletenessError("missing embedding for relation " + std::to_string(r));
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Entity sets
// ---------------------------------------------------------------------------

enum class Side { head, tail };

struct EntitySet {
  std::vector<EntityId> ids;  // ascending, no duplicates
  std::string role;

  std::size_t size() const noexcept { return ids.size(); }
  bool empty() const noexcept { return ids.empty(); }
};

inline EntitySet extract_entities(const EdgeTable& table, Side side, std::string role = {}) {
  EntitySet set{{}, std::move(role)};
  if (side == Side::head) {
    set.ids = table.heads();
    return set;
  }
  table.for_each([&](EntityId, std::span<const EntityId> tails) {
    set.ids.insert(set.ids.end(), tails.begin(), tails.end());
  });
  std::sort(set.ids.begin(), set.ids.end());
  set.ids.erase(std::unique(set.ids.begin(), set.ids.end()), set.ids.end());
  return set;
}

// ---------------------------------------------------------------------------
// Store
// ---------------------------------------------------------------------------

// Sealed, immutable knowledge graph: per-relation edge tables, entity
// embeddings keyed by sparse id, and a dense relation embedding table.
class KGStore {
 public:
  KGStore(std::size_t dim, std::vector<EdgeTable> edge_tables, EntityEmbeddingMap entities,
          std::vector<Embedding> relations)
      : dim_(dim),
        edge_tables_(std::move(edge_tables)),
        entities_(std::move(entities)),
        relations_(std::move(relations)) {
    if (dim_ == 0) throw ArgumentError("embedding dimension must be at least 1");
    if (edge_tables_.size() != relations_.size()) {
      throw CompletenessError("store has " + std::to_string(edge_tables_.size()) +
                              " edge tables but " + std::to_string(relations_.size()) +
                              " relation embeddings");
    }
    for (std::size_t r = 0; r < relations_.size(); ++r) {
      if (relations_[r].size() != dim_) {
        throw DimensionError("relation " + std::to_string(r) + " embedding has dimension " +
                             std::to_string(relations_[r].size()));
      }
      if (to_underlying(edge_tables_[r].relation()) != r) {
        throw ArgumentError("edge tables must be indexed by relation id");
      }
      edge_tables_[r].seal();
    }
    if (!entities_.sealed()) entities_.seal();
    entities_.for_each([this](EntityId id, const Embedding& e) {
      if (e.size() != dim_) {
        throw DimensionError("entity " + std::to_string(to_underlying(id)) +
                             " embedding has dimension " + std::to_string(e.size()));
      }
    });
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_relations() const noexcept { return relations_.size(); }
  std::size_t num_entity_embeddings() const { return entities_.size(); }

  bool has_relation(RelationId r) const noexcept { return to_underlying(r) < relations_.size(); }

  const EdgeTable& edge_table(RelationId r) const {
    if (!has_relation(r)) throw RangeError("unknown relation " + std::to_string(to_underlying(r)));
    return edge_tables_[to_underlying(r)];
  }

  std::span<const EdgeTable> edge_tables() const noexcept { return edge_tables_; }

  // nullptr when the entity has no embedding.
  const Embedding* entity_embedding(EntityId id) const { return entities_.find(id); }

  const Embedding& relation_embedding(RelationId r) const {
    if (!has_relation(r)) throw RangeError("unknown relation " + std::to_string(to_underlying(r)));
    return relations_[to_underlying(r)];
  }

  const EntityEmbeddingMap& entity_embeddings() const noexcept { return entities_; }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& t : edge_tables_) n += t.edge_count();
    return n;
  }

  // Distinct out-edges ordered by (relation, tail) ascending. Repeated
  // triples are visited once.
  template <class Visit>
  void for_each_out_edge(EntityId head, Visit&& visit) const {
    for (const auto& table : edge_tables_) {
      const auto tails = table.tails(head);
      for (std::size_t i = 0; i < tails.size(); ++i) {
        if (i > 0 && tails[i] == tails[i - 1]) continue;
        visit(table.relation(), tails[i]);
      }
    }
  }

 private:
  std::size_t dim_;
  std::vector<EdgeTable> edge_tables_;
  EntityEmbeddingMap entities_;
  std::vector<Embedding> relations_;
};

// Builds a store from three text streams in the on-disk formats.
inline KGStore load_store(std::istream& edges, std::istream& entity_embeddings,
                          std::istream& relation_embeddings, std::size_t dim,
                          std::size_t num_relations, ThreadTeam& team) {
  auto relations = load_relation_embeddings(relation_embeddings, dim, num_relations);
  auto tables = ingest_edges(edges, num_relations, team);
  auto entities = load_entity_embeddings(entity_embeddings, dim, team);
  return KGStore(dim, std::move(tables), std::move(entities), std::move(relations));
}

namespace detail {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return in;
}

}  // namespace detail

inline std::size_t count_lines(const std::string& path) {
  auto in = detail::open_input(path);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

// num_relations == 0 means "one relation per row of the relation file".
inline KGStore load_store_files(const std::string& edges_path, const std::string& entity_path,
                                const std::string& relation_path, std::size_t dim,
                                std::size_t num_relations, ThreadTeam& team) {
  if (num_relations == 0) num_relations = count_lines(relation_path);
  auto edges = detail::open_input(edges_path);
  auto entities = detail::open_input(entity_path);
  auto relations = detail::open_input(relation_path);
  return load_store(edges, entities, relations, dim, num_relations, team);
}

}  // namespace mhr
