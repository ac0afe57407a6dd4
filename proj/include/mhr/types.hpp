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

#include <cstdint>
#include <ostream>
#include <vector>

namespace mhr {

// Entity ids are sparse 64-bit keys. Relation ids are dense, 0..R-1.
enum class EntityId : std::uint64_t {};
enum class RelationId : std::uint32_t {};

constexpr std::uint64_t to_underlying(EntityId id) noexcept {
  return static_cast<std::uint64_t>(id);
}
constexpr std::uint32_t to_underlying(RelationId id) noexcept {
  return static_cast<std::uint32_t>(id);
}
constexpr EntityId entity(std::uint64_t raw) noexcept { return EntityId{raw}; }
constexpr RelationId relation(std::uint32_t raw) noexcept { return RelationId{raw}; }

inline std::ostream& operator<<(std::ostream& os, EntityId id) {
  return os << to_underlying(id);
}
inline std::ostream& operator<<(std::ostream& os, RelationId id) {
  return os << to_underlying(id);
}

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Dense real vector for an entity or relation. Composite embeddings
// (head + relation sums) use the same representation.
using Embedding = std::vector<double>;

}  // namespace mhr
