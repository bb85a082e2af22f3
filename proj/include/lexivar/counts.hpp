#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexivar/unitizer.hpp"

namespace lexivar {

using Count = std::uint64_t;
template <typename V>
using KeyedBy = std::map<std::string, V>;

/// Joint and marginal frequencies of (unit, tuple) pairs. Tuples are held by
/// their serialized key. Ordered maps keep every traversal deterministic, so
/// results do not depend on how rows were sharded.
struct CountsTable {
  KeyedBy<KeyedBy<Count>> joint;           // tuple -> unit -> f(u,v)
  KeyedBy<Count> unit_marginal;            // unit -> f(u)
  KeyedBy<Count> tuple_marginal;           // tuple -> f(v)
  Count total = 0;                         // N
  KeyedBy<Count> texts_per_tuple;
  KeyedBy<Count> tokens_per_tuple;
  KeyedBy<Count> duplicates_per_tuple;
  KeyedBy<KeyedBy<Count>> token_freq;      // tuple -> token -> count, for diversity
  KeyedBy<KeyedBy<Count>> text_occurrences;  // tuple -> exact text -> count

  std::size_t vocab_size() const { return unit_marginal.size(); }
  std::set<std::string> vocab() const;

  /// Adds one logical row. `tokens` are the preprocessed tokens the units
  /// were built from.
  void add_row(const std::string& tuple, const UnitBag& units, const TokenList& tokens,
               const std::string& text);
  /// Associative, commutative merge of a partial table.
  void merge(const CountsTable& other);

  bool operator==(const CountsTable&) const = default;
};

/// Builds counts from per-row inputs; the three vectors are indexed by
/// logical row. `tokens` may be empty, in which case diversity substrate is
/// derived from nothing and only unit counts are kept.
CountsTable build_counts(const std::vector<UnitBag>& bags, const std::vector<std::string>& tuples,
                         const std::vector<std::string>& texts,
                         const std::vector<TokenList>& tokens = {});

}  // namespace lexivar
