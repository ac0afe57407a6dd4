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

#include <charconv>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>

#include "mhr/error.hpp"
#include "mhr/generic.hpp"
#include "mhr/kgstore.hpp"
#include "mhr/pipeline.hpp"
#include "mhr/topk.hpp"
#include "mhr/types.hpp"

namespace mhr {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw Error("cannot format value");
  return std::string(buf, ptr);
}

inline void write_embedding_row(std::ostream& os, std::uint64_t id, std::span<const double> v) {
  os << id << '\t';
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j != 0) os << ' ';
    os << format_double(v[j]);
  }
  os << '\n';
}

inline void write_triple(std::ostream& os, const Triple& t) {
  os << to_underlying(t.head) << '\t' << to_underlying(t.relation) << '\t'
     << to_underlying(t.tail) << '\n';
}

// person_id<TAB>person_score<TAB>rank
inline void render_persons_tsv(std::ostream& os, const AffiliationResult& r) {
  std::size_t rank = 1;
  for (const auto& p : r.ranked_persons) {
    os << to_underlying(p.entity) << '\t' << format_double(p.score) << '\t' << rank++ << '\n';
  }
}

// person_id<TAB>university_id<TAB>score<TAB>rank, persons in ranked order.
inline void render_affiliations_tsv(std::ostream& os, const AffiliationResult& r) {
  for (const auto& p : r.ranked_persons) {
    auto it = r.affiliations.find(p.entity);
    if (it == r.affiliations.end()) continue;
    std::size_t rank = 1;
    for (const auto& u : it->second) {
      os << to_underlying(p.entity) << '\t' << to_underlying(u.entity) << '\t'
         << format_double(u.score) << '\t' << rank++ << '\n';
    }
  }
}

inline void render_text_table(std::ostream& os, const AffiliationResult& r) {
  os << "Ranked persons\n";
  os << std::left << std::setw(6) << "rank" << std::setw(14) << "person" << "score\n";
  std::size_t rank = 1;
  for (const auto& p : r.ranked_persons) {
    os << std::left << std::setw(6) << rank++ << std::setw(14) << to_underlying(p.entity)
       << format_double(p.score) << '\n';
  }
  for (const auto& p : r.ranked_persons) {
    os << "\nAffiliations of " << to_underlying(p.entity) << '\n';
    os << std::left << std::setw(6) << "rank" << std::setw(14) << "university" << "score\n";
    auto it = r.affiliations.find(p.entity);
    if (it == r.affiliations.end()) continue;
    std::size_t u_rank = 1;
    for (const auto& u : it->second) {
      os << std::left << std::setw(6) << u_rank++ << std::setw(14) << to_underlying(u.entity)
         << format_double(u.score) << '\n';
    }
  }
}

// score<TAB>node0,rel0,node1,...,nodeN
inline void render_paths(std::ostream& os, std::span<const ScoredPath> paths) {
  for (const auto& sp : paths) {
    os << format_double(sp.score) << '\t';
    for (std::size_t i = 0; i < sp.path.nodes.size(); ++i) {
      if (i != 0) os << ',' << to_underlying(sp.path.relations[i - 1]) << ',';
      os << to_underlying(sp.path.nodes[i]);
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Label maps: label<TAB>entity_id
// ---------------------------------------------------------------------------

using LabelMap = std::map<std::string, EntityId, std::less<>>;

inline LabelMap read_label_map(std::istream& in) {
  LabelMap labels;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(n, "expected label<TAB>entity_id");
    const auto id = detail::parse_u64(std::string_view(line).substr(tab + 1), n, "entity id");
    if (!labels.emplace(line.substr(0, tab), EntityId{id}).second) {
      throw DuplicateError(n, "duplicate label '" + line.substr(0, tab) + "'");
    }
  }
  return labels;
}

// A raw decimal id, or a label from the map.
inline EntityId resolve_entity(std::string_view token, const LabelMap& labels) {
  std::uint64_t raw = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), raw);
  if (!token.empty() && ec == std::errc{} && ptr == token.data() + token.size()) {
    return EntityId{raw};
  }
  auto it = labels.find(token);
  if (it == labels.end()) throw QueryError("unknown entity label '" + std::string(token) + "'");
  return it->second;
}

}  // namespace mhr
